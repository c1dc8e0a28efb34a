//! Pair counts between two separated arcs of the parabola.

use parabola_core::discretized::{build_ap_set, lift_to_parabola, DiscretizedSet};
use parabola_core::energy::transversal_pair_count;
use parabola_core::rng::Stream;
use parabola_core::Point;

use super::Output;
use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::report::Check;

pub const TAUS: [f64; 2] = [0.25, 0.5];
pub const TRIALS: u64 = 50;
pub const TOLERANCE: f64 = 6.0;
pub const CEILING: f64 = 8.0;

/// `{−τ/2 − a(1 − τ/2)}` and `{τ/2 + a(1 − τ/2)}` lifted to the parabola.
pub fn arcs(s: f64, delta: f64, tau: f64) -> Result<(DiscretizedSet, DiscretizedSet), LabError> {
    let a = build_ap_set(s, delta)?;
    let stretch = 1.0 - tau / 2.0;
    let left: Vec<f64> = a.points().iter().map(|p| -tau / 2.0 - p[0] * stretch).collect();
    let right: Vec<f64> = a.points().iter().map(|p| tau / 2.0 + p[0] * stretch).collect();
    Ok((
        lift_to_parabola(&DiscretizedSet::on_line(&left, delta)?, false)?,
        lift_to_parabola(&DiscretizedSet::on_line(&right, delta)?, false)?,
    ))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output, LabError> {
    let mut out = Output::default();
    let delta = cfg.delta_list[0];
    let (mut worst, mut violations) = (0.0f64, 0u32);
    let mut rows = Vec::new();
    for &tau in &TAUS {
        let (pi, pj) = arcs(cfg.s, delta, tau)?;
        for k in 0..TRIALS {
            let mut rng = Stream::indexed(cfg.seed, &format!("transversal_{tau}"), k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            // Aim y0 at a chosen pair so that most trials count something.
            let x = pi.points()[rng.below(pi.len() as u64) as usize];
            let y = pj.points()[rng.below(pj.len() as u64) as usize];
            let x0: Point = [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)];
            let eta = [rng.range(-1.0, 1.0) * TOLERANCE * delta, rng.range(-1.0, 1.0) * TOLERANCE * delta];
            let y0 = if sign > 0.0 {
                [-(x[0] + x0[0] + y[0]) + eta[0], -(x[1] + x0[1] + y[1]) + eta[1]]
            } else {
                [x[0] + x0[0] - y[0] + eta[0], x[1] + x0[1] - y[1] + eta[1]]
            };
            let r = transversal_pair_count(&pi, &pj, x0, y0, sign, TOLERANCE)?;
            worst = worst.max(r.ratio);
            if r.ratio > CEILING {
                violations += 1;
            }
            rows.push(serde_json::json!({ "tau": tau, "trial": k, "sign": sign, "count": r.count, "ratio": r.ratio }));
        }
    }
    out.checks.push(Check::le("transversal_max_ratio", worst, CEILING));
    out.checks.push(Check::eq("transversal_violations", violations as f64, 0.0));
    out.put("trials", &rows)?;
    Ok(out)
}
