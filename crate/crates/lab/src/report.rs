//! Report documents and their offline re-verification.

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use parabola_core::furstenberg::{dbz_diagnostic, FurstenbergCandidate, PipelineReport};
use parabola_core::hyperbolic::line_metric;

use crate::config::{ConfigEcho, Experiment};
use crate::fit::{fit_loglog, LogLogFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "==")]
    Eq,
}

impl Op {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Op::Le => value <= threshold,
            Op::Lt => value < threshold,
            Op::Ge => value >= threshold,
            Op::Gt => value > threshold,
            Op::Eq => value == threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Le => "<=",
            Op::Lt => "<",
            Op::Ge => ">=",
            Op::Gt => ">",
            Op::Eq => "==",
        }
    }
}

fn nan_if_null<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// One thresholded quantity. A NaN value never passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(deserialize_with = "nan_if_null")]
    pub value: f64,
    pub op: Op,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, op: Op, threshold: f64) -> Self {
        Check { name: name.to_string(), value, op, threshold, pass: op.holds(value, threshold) }
    }

    pub fn le(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Op::Le, threshold)
    }

    pub fn ge(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Op::Ge, threshold)
    }

    pub fn gt(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Op::Gt, threshold)
    }

    pub fn eq(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Op::Eq, threshold)
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} = {} {} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            crate::io::fmt_f64(self.value),
            self.op.symbol(),
            crate::io::fmt_f64(self.threshold)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Breach,
}

/// A log-log fit together with the points it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub name: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub fit: LogLogFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: Experiment,
    pub config: ConfigEcho,
    pub checks: Vec<Check>,
    pub data: Value,
    pub status: Status,
}

impl Report {
    pub fn new(config: ConfigEcho, checks: Vec<Check>, data: Value) -> Self {
        let status = if checks.iter().all(|c| c.pass) { Status::Pass } else { Status::Breach };
        Report { experiment: config.experiment, config, checks, data, status }
    }
}

/// Re-checks a report without rerunning its experiment. Returns the list of
/// problems found; empty means the report is internally consistent and all
/// its checks pass.
pub fn verify(report: &Report) -> Vec<String> {
    let mut problems = Vec::new();
    let mut all_hold = true;
    for c in &report.checks {
        let holds = c.op.holds(c.value, c.threshold);
        all_hold &= holds;
        if c.pass != holds {
            problems.push(format!("check {} records pass = {} but recomputes otherwise", c.name, c.pass));
        }
        if !holds {
            problems.push(format!("check {} fails: {}", c.name, c.line()));
        }
    }
    let expect = if all_hold { Status::Pass } else { Status::Breach };
    if report.status != expect {
        problems.push(format!("status {:?} disagrees with the checks", report.status));
    }
    if report.experiment != report.config.experiment {
        problems.push("experiment field disagrees with the config".into());
    }
    if let Some(fits) = report.data.get("fits") {
        match serde_json::from_value::<Vec<FitRecord>>(fits.clone()) {
            Ok(fits) => {
                for f in fits {
                    match fit_loglog(&f.xs, &f.ys, report.config.seed) {
                        Ok(again) if again == f.fit => {}
                        Ok(again) => problems.push(format!("fit {} recomputes to slope {}", f.name, again.slope)),
                        Err(e) => problems.push(format!("fit {}: {e}", f.name)),
                    }
                }
            }
            Err(e) => problems.push(format!("malformed fits: {e}")),
        }
    }
    if report.experiment == Experiment::Pipeline {
        verify_pipeline(&report.data, &mut problems);
    }
    problems
}

fn verify_pipeline(data: &Value, problems: &mut Vec<String>) {
    let candidate = data.get("candidate").cloned().map(serde_json::from_value::<FurstenbergCandidate>);
    let summary = data.get("report").cloned().map(serde_json::from_value::<PipelineReport>);
    let (Some(Ok(cand)), Some(Ok(summary))) = (candidate, summary) else {
        problems.push("pipeline data lacks a readable candidate and report".into());
        return;
    };
    let delta = cand.lines.delta;
    for sl in &cand.per_line {
        let Some(line) = cand.lines.lines.get(sl.line as usize) else {
            problems.push(format!("slice refers to missing line {}", sl.line));
            continue;
        };
        for &m in &sl.members {
            match cand.points.get(m as usize) {
                Some(&p) if crate::experiments::pipeline::cross_distance(line, p) <= sl.width * delta * (1.0 + 1e-9) => {}
                Some(_) => problems.push(format!("point {m} lies outside the recorded width of line {}", sl.line)),
                None => problems.push(format!("slice of line {} refers to missing point {m}", sl.line)),
            }
        }
    }
    let lines = &cand.lines.lines;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if line_metric(&lines[i], &lines[j]) < delta * (1.0 - 1e-12) {
                problems.push(format!("lines {i} and {j} are closer than delta"));
            }
        }
    }
    match dbz_diagnostic(&cand) {
        Ok(d) => {
            if d != summary.diagnostic {
                problems.push("recomputed diagnostic differs from the stored one".into());
            }
            if !d.verdict.is_consistent() {
                problems.push(format!("verdict {:?}", d.verdict));
            }
        }
        Err(e) => problems.push(format!("diagnostic: {e}")),
    }
}
