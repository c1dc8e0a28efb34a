use std::path::Path;

use thiserror::Error;

use crate::fit::FitError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] parabola_core::Error),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("report: {0}")]
    Report(String),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io { path: path.display().to_string(), source }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        use parabola_core::Error as E;
        match self {
            LabError::Config(_) => crate::EXIT_CONFIG,
            // Parameter and guard failures come from what the config asked for.
            LabError::Core(E::Parameter(_) | E::Domain(_) | E::Resource(_)) => crate::EXIT_CONFIG,
            LabError::Fit(_) => crate::EXIT_CONFIG,
            LabError::Report(_) => crate::EXIT_BREACH,
            LabError::Io { .. } | LabError::Core(_) => crate::EXIT_IO,
        }
    }
}
