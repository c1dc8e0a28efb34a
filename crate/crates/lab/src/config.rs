use std::path::{Path, PathBuf};

use parabola_core::furstenberg::PipelineLimits;
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Identities,
    L4Slope,
    Sharpness,
    Transversal,
    Pipeline,
    EnergyBench,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Identities,
        Experiment::L4Slope,
        Experiment::Sharpness,
        Experiment::Transversal,
        Experiment::Pipeline,
        Experiment::EnergyBench,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Identities => "identities",
            Experiment::L4Slope => "l4_slope",
            Experiment::Sharpness => "sharpness",
            Experiment::Transversal => "transversal",
            Experiment::Pipeline => "pipeline",
            Experiment::EnergyBench => "energy_bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    /// Cap on the pairs enumerated by the pipeline.
    pub pair_limit: usize,
    /// Largest accepted (δ,s)-set constant of the pipeline input.
    pub max_set_constant: f64,
    /// Fourier grid spacing `h`.
    pub spacing: f64,
    /// Largest stored Fourier grid, in bytes.
    pub memory_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        let p = PipelineLimits::default();
        Limits {
            pair_limit: p.pair_limit,
            max_set_constant: p.max_set_constant,
            spacing: parabola_core::fourier::MAX_SPACING,
            memory_budget: parabola_core::fourier::DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl Limits {
    pub fn pipeline(&self) -> PipelineLimits {
        PipelineLimits { pair_limit: self.pair_limit, max_set_constant: self.max_set_constant }
    }
}

fn default_s() -> f64 {
    0.5
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default)]
    pub delta_list: Vec<f64>,
    #[serde(default, rename = "R_list")]
    pub r_list: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

/// The config as echoed into reports: everything but the output location,
/// so a report does not depend on where it was written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub experiment: Experiment,
    pub s: f64,
    pub delta_list: Vec<f64>,
    #[serde(rename = "R_list")]
    pub r_list: Vec<f64>,
    pub seed: u64,
    pub limits: Limits,
}

fn is_power_of_two(x: f64) -> bool {
    x > 0.0 && x.is_finite() && (x.to_bits() & ((1u64 << 52) - 1)) == 0
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        if let Some(name) = raw.get("experiment").and_then(|v| v.as_str()) {
            if !Experiment::ALL.iter().any(|e| e.name() == name) {
                let known: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                return Err(LabError::Config(format!("unknown experiment {name:?}; expected one of {}", known.join(", "))));
            }
        }
        let cfg: ExperimentConfig = serde_json::from_value(raw).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path`; a relative `output_dir` is taken relative to the
    /// working directory.
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            experiment: self.experiment,
            s: self.s,
            delta_list: self.delta_list.clone(),
            r_list: self.r_list.clone(),
            seed: self.seed,
            limits: self.limits,
        }
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let err = |m: String| Err(LabError::Config(m));
        if !(self.s > 0.0 && self.s < 1.0) {
            return err(format!("s = {} outside (0, 1)", self.s));
        }
        if let Some(d) = self.delta_list.iter().find(|&&d| !(is_power_of_two(d) && d <= 1.0)) {
            return err(format!("delta {d} is not 2^-m"));
        }
        if let Some(r) = self.r_list.iter().find(|&&r| !(is_power_of_two(r) && r >= 1.0)) {
            return err(format!("R {r} is not a power of two >= 1"));
        }
        let l = &self.limits;
        if !(l.spacing > 0.0 && l.spacing <= parabola_core::fourier::MAX_SPACING) {
            return err(format!("spacing {} outside (0, 1/8]", l.spacing));
        }
        if !(l.max_set_constant >= 1.0) || l.pair_limit == 0 {
            return err("limits need max_set_constant >= 1 and pair_limit >= 1".into());
        }
        let deltas = self.delta_list.len();
        match self.experiment {
            Experiment::L4Slope if deltas != 1 || self.r_list.len() < 4 => {
                err("l4_slope needs one delta and at least 4 radii".into())
            }
            Experiment::Sharpness if deltas < 4 => err("sharpness needs at least 4 deltas".into()),
            Experiment::Transversal | Experiment::Pipeline if deltas != 1 => {
                err(format!("{} needs exactly one delta", self.experiment.name()))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let cfg = ExperimentConfig::parse(
            r#"{"experiment": "pipeline", "s": 0.5, "delta_list": [0.0009765625], "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::Pipeline);
        assert_eq!(cfg.limits, Limits::default());
        assert_eq!(cfg.output_dir, PathBuf::from("out"));

        let bad = [
            r#"{"experiment": "nope", "seed": 1}"#,
            r#"{"experiment": "identities"}"#,
            r#"{"experiment": "pipeline", "delta_list": [0.001], "seed": 1}"#,
            r#"{"experiment": "l4_slope", "delta_list": [0.25], "R_list": [16, 32, 48, 64], "seed": 1}"#,
            r#"{"experiment": "identities", "seed": 1, "colour": "red"}"#,
            r#"{"experiment": "identities", "seed": 1, "s": 1.5}"#,
        ];
        for text in bad {
            assert!(matches!(ExperimentConfig::parse(text), Err(LabError::Config(_))), "{text}");
        }
    }

    #[test]
    fn shipped_configs_validate() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
        let mut seen = Vec::new();
        for entry in std::fs::read_dir(dir).unwrap() {
            seen.push(ExperimentConfig::load(&entry.unwrap().path()).unwrap().experiment);
        }
        for e in Experiment::ALL {
            assert!(seen.contains(&e), "no sample config for {}", e.name());
        }
    }

    #[test]
    fn dyadic_detection() {
        assert!(is_power_of_two(1.0) && is_power_of_two(0.0009765625) && is_power_of_two(1024.0));
        assert!(!is_power_of_two(0.1) && !is_power_of_two(3.0) && !is_power_of_two(0.0) && !is_power_of_two(f64::NAN));
    }
}
