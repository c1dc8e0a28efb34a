//! The full construction on an AP instance, with structural checks.

use parabola_core::discretized::{build_ap_set, lift_to_parabola};
use parabola_core::furstenberg::run_pipeline;
use parabola_core::hyperbolic::{line_metric, Line};
use parabola_core::rng::Stream;
use parabola_core::Point;

use super::Output;
use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::report::Check;

/// Distance from `p` to `line`, via the cross product with the direction.
/// Kept separate from the core distance so slices are re-checked by other
/// code.
pub fn cross_distance(line: &Line, p: Point) -> f64 {
    let [d0, d1] = line.direction;
    let (u, v) = (p[0] - line.offset[0], p[1] - line.offset[1]);
    (d0 * v - d1 * u).abs() / d0.hypot(d1)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output, LabError> {
    let mut out = Output::default();
    let delta = cfg.delta_list[0];
    let p = lift_to_parabola(&build_ap_set(cfg.s, delta)?, true)?;
    let anchor = p.points()[Stream::new(cfg.seed, "anchor").below(p.len() as u64) as usize];
    let (cand, report) = run_pipeline(&p, anchor, cfg.s, &cfg.limits.pipeline())?;

    let lines = &cand.lines.lines;
    let mut min_sep = f64::INFINITY;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            min_sep = min_sep.min(line_metric(&lines[i], &lines[j]));
        }
    }
    let mut outside = 0usize;
    for sl in &cand.per_line {
        let line = &lines[sl.line as usize];
        outside += sl.members.iter().filter(|&&m| cross_distance(line, cand.points[m as usize]) > sl.width * delta * (1.0 + 1e-9)).count();
    }
    let size = report.p_size as f64;
    out.checks.push(Check::le("covering_at_most_pairs", report.f_prime_covering as f64, size * size));
    out.checks.push(Check::ge("min_slice_size", report.min_slice_size as f64, 1.0));
    out.checks.push(Check::eq("slice_points_outside_width", outside as f64, 0.0));
    out.checks.push(Check::ge("line_separation_over_delta", min_sep / delta, 1.0 - 1e-12));
    out.checks.push(Check::eq("verdict_consistent", report.diagnostic.verdict.is_consistent() as u8 as f64, 1.0));
    out.put("candidate", &cand)?;
    out.put("report", &report)?;
    Ok(out)
}
