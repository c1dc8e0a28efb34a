pub mod energy_bench;
pub mod identities;
pub mod l4_slope;
pub mod pipeline;
pub mod sharpness;
pub mod transversal;

use serde_json::{Map, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::LabError;
use crate::fit::{fit_loglog, LogLogFit};
use crate::io::{fmt_f64, Table};
use crate::report::{Check, FitRecord};

/// Everything an experiment produces before it is written out.
#[derive(Debug, Default)]
pub struct Output {
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    pub fits: Vec<FitRecord>,
    pub tables: Vec<Table>,
    /// Files under `plotdata/`.
    pub plots: Vec<Table>,
    /// Raw files written next to the tables.
    pub blobs: Vec<(String, Vec<u8>)>,
}

impl Output {
    pub fn put<T: serde::Serialize>(&mut self, key: &str, value: &T) -> Result<(), LabError> {
        let v = serde_json::to_value(value).map_err(|e| LabError::Report(e.to_string()))?;
        self.data.insert(key.to_string(), v);
        Ok(())
    }

    /// Fits `ys ~ xs^slope`, records the fit and its plot-data file.
    pub fn fit(&mut self, name: &str, xs: &[f64], ys: &[f64], seed: u64) -> Result<LogLogFit, LabError> {
        let fit = fit_loglog(xs, ys, seed)?;
        let mut plot = Table::new(name, &["x", "y", "fit", "slope", "slope_lo", "slope_hi"]);
        for (&x, &y) in xs.iter().zip(ys) {
            let line = libm::exp(fit.intercept + fit.slope * libm::log(x));
            plot.push(vec![fmt_f64(x), fmt_f64(y), fmt_f64(line), fmt_f64(fit.slope), fmt_f64(fit.band[0]), fmt_f64(fit.band[1])]);
        }
        self.plots.push(plot);
        self.fits.push(FitRecord { name: name.to_string(), xs: xs.to_vec(), ys: ys.to_vec(), fit });
        Ok(fit)
    }

    /// Takes the data map, with the fits folded in under `"fits"`.
    pub fn take_data(&mut self) -> Result<Value, LabError> {
        let mut data = std::mem::take(&mut self.data);
        if !self.fits.is_empty() {
            let fits = serde_json::to_value(&self.fits).map_err(|e| LabError::Report(e.to_string()))?;
            data.insert("fits".into(), fits);
        }
        Ok(Value::Object(data))
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Output, LabError> {
    match cfg.experiment {
        Experiment::Identities => identities::run(cfg),
        Experiment::L4Slope => l4_slope::run(cfg),
        Experiment::Sharpness => sharpness::run(cfg),
        Experiment::Transversal => transversal::run(cfg),
        Experiment::Pipeline => pipeline::run(cfg),
        Experiment::EnergyBench => energy_bench::run(cfg),
    }
}
