//! Energy counting: oracle against the bucketed path, the energy-sumset
//! inequality, and timings.

use parabola_core::discretized::DiscretizedSet;
use parabola_core::energy::{additive_energy_hashed, additive_energy_oracle, energy_sumset_inequality};
use parabola_core::rng::Stream;
use parabola_core::Point;

use super::Output;
use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::io::{fmt_f64, Table};
use crate::report::Check;

pub const EQUIVALENCE_SETS: u64 = 200;
pub const INEQUALITY_SETS: u64 = 100;
pub const MAX_SET: u64 = 12;
pub const DEFAULT_DELTA: f64 = 1.0 / 64.0;
pub const BENCH_SIZES: [usize; 6] = [4, 8, 12, 16, 20, 24];

/// Distinct grid points `δ(a, b)` with `|a|, |b| <= reach`.
fn grid_points(rng: &mut Stream, size: u64, reach: i64, planar: bool, delta: f64) -> Vec<Point> {
    let mut keys: Vec<(i64, i64)> = Vec::new();
    while (keys.len() as u64) < size {
        let a = rng.below((2 * reach + 1) as u64) as i64 - reach;
        let b = if planar { rng.below((2 * reach + 1) as u64) as i64 - reach } else { 0 };
        if !keys.contains(&(a, b)) {
            keys.push((a, b));
        }
    }
    keys.into_iter().map(|(a, b)| [a as f64 * delta, b as f64 * delta]).collect()
}

/// δ-separated points with real coordinates in `[-1/4, 1/4]^2`.
fn real_points(rng: &mut Stream, size: u64, delta: f64) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    while (pts.len() as u64) < size {
        let p = [rng.range(-0.25, 0.25), rng.range(-0.25, 0.25)];
        if pts.iter().all(|q| (p[0] - q[0]).hypot(p[1] - q[1]) >= delta) {
            pts.push(p);
        }
    }
    pts
}

/// Oracle/bucketed agreement over random sets cycling through every
/// `(n, tol)` combination and through grid, line and off-grid point sets.
pub fn equivalence_suite(seed: u64, delta: f64) -> Result<Vec<Check>, LabError> {
    let tols = [0.0, delta, 6.0 * delta];
    let mut mismatches = 0u32;
    for k in 0..EQUIVALENCE_SETS {
        let mut rng = Stream::indexed(seed, "energy_sets", k);
        let size = 1 + rng.below(MAX_SET);
        let pts = match k % 4 {
            0 | 1 => grid_points(&mut rng, size, 6, true, delta),
            2 => grid_points(&mut rng, size, 12, false, delta),
            _ => real_points(&mut rng, size, delta),
        };
        let dim = if k % 4 == 2 { 1 } else { 2 };
        let p = DiscretizedSet::new(pts, delta, dim)?;
        let n = 2 + (k % 2) as usize;
        let tol = tols[((k / 2) % 3) as usize];
        if additive_energy_oracle(&p, n, tol)?.count != additive_energy_hashed(&p, n, tol)?.count {
            mismatches += 1;
        }
    }
    let binary = DiscretizedSet::on_line(&[0.0, 1.0], delta)?;
    let e3_oracle = additive_energy_oracle(&binary, 3, 0.0)?.count;
    let e3_hashed = additive_energy_hashed(&binary, 3, 0.0)?.count;

    let mut violations = 0u32;
    for k in 0..INEQUALITY_SETS {
        let mut rng = Stream::indexed(seed, "sumset_sets", k);
        let size = 1 + rng.below(10);
        let planar = k % 2 == 1;
        let p = DiscretizedSet::new(grid_points(&mut rng, size, 20, planar, delta), delta, if planar { 2 } else { 1 })?;
        let n = 2 + (k % 3 == 0) as usize;
        if !energy_sumset_inequality(&p, n)?.holds {
            violations += 1;
        }
    }
    Ok(vec![
        Check::eq("energy_oracle_mismatches", mismatches as f64, 0.0),
        Check::eq("e3_binary_oracle", e3_oracle as f64, 20.0),
        Check::eq("e3_binary_hashed", e3_hashed as f64, 20.0),
        Check::eq("energy_sumset_violations", violations as f64, 0.0),
    ])
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output, LabError> {
    let delta = cfg.delta_list.first().copied().unwrap_or(DEFAULT_DELTA);
    let mut out = Output { checks: equivalence_suite(cfg.seed, delta)?, ..Default::default() };

    // Timings go to the table only, so the report stays reproducible.
    let mut table = Table::new("energy_bench", &["n", "delta_tol", "count", "method", "ns", "points"]);
    for &size in &BENCH_SIZES {
        let mut rng = Stream::indexed(cfg.seed, "bench", size as u64);
        let p = DiscretizedSet::new(grid_points(&mut rng, size as u64, 10, true, delta), delta, 2)?;
        for report in [additive_energy_oracle(&p, 3, delta)?, additive_energy_hashed(&p, 3, delta)?] {
            table.push(vec![
                report.n.to_string(),
                fmt_f64(report.delta_tol),
                report.count.to_string(),
                serde_json::to_value(report.method).map_err(|e| LabError::Report(e.to_string()))?.as_str().unwrap_or("").to_string(),
                report.runtime_ns.to_string(),
                size.to_string(),
            ]);
        }
    }
    out.tables.push(table);
    Ok(out)
}
