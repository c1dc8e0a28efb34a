//! Experiment runner: configs in, reports, tables and plot data out.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod io;
pub mod report;

use std::path::{Path, PathBuf};

pub use config::{Experiment, ExperimentConfig};
pub use error::LabError;
pub use report::{Check, Report, Status};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_BREACH: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Golden {
    /// No golden file was given.
    Unused,
    Written,
    Matched,
    Mismatched,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub report_path: PathBuf,
    pub golden: Golden,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.status == Status::Pass && self.golden != Golden::Mismatched {
            EXIT_OK
        } else {
            EXIT_BREACH
        }
    }
}

/// Runs the experiment and writes `report.json`, `tables/*.csv`,
/// `plotdata/*.csv` and any binary dumps under `output_dir`. With a golden
/// path, the report bytes are compared against it, or written there if the
/// file does not exist yet.
pub fn run(cfg: &ExperimentConfig, golden: Option<&Path>) -> Result<Outcome, LabError> {
    cfg.validate()?;
    let mut output = experiments::run_experiment(cfg)?;
    let data = output.take_data()?;
    let report = Report::new(cfg.echo(), std::mem::take(&mut output.checks), data);
    let bytes = io::to_json(&report)?;

    let dir = &cfg.output_dir;
    let report_path = dir.join("report.json");
    io::write_file(&report_path, &bytes)?;
    for t in &output.tables {
        io::write_file(&dir.join("tables").join(format!("{}.csv", t.name)), &t.to_csv()?)?;
    }
    for t in &output.plots {
        io::write_file(&dir.join("plotdata").join(format!("{}.csv", t.name)), &t.to_csv()?)?;
    }
    for (name, blob) in &output.blobs {
        io::write_file(&dir.join("tables").join(name), blob)?;
    }

    let golden = match golden {
        None => Golden::Unused,
        Some(path) if path.exists() => {
            let stored = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
            if stored == bytes {
                Golden::Matched
            } else {
                Golden::Mismatched
            }
        }
        Some(path) => {
            io::write_file(path, &bytes)?;
            Golden::Written
        }
    };
    Ok(Outcome { report, report_path, golden })
}

/// Reads a report and re-checks it offline.
pub fn verify_file(path: &Path) -> Result<Vec<String>, LabError> {
    let bytes = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
    let report: Report = serde_json::from_slice(&bytes).map_err(|e| LabError::Report(format!("{}: {e}", path.display())))?;
    Ok(report::verify(&report))
}
