//! Covering of `3A × 3A²` for AP sets across scales.

use parabola_core::energy::ap_product_covering;

use super::Output;
use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::report::Check;

pub const SLOPE_BAND: f64 = 0.3;
pub const FOLD: usize = 3;

pub fn run(cfg: &ExperimentConfig) -> Result<Output, LabError> {
    let mut out = Output::default();
    let s = cfg.s;
    let mut deltas = cfg.delta_list.clone();
    deltas.sort_by(f64::total_cmp);
    let mut counts = Vec::new();
    let mut rows = Vec::new();
    for &delta in &deltas {
        let rho = libm::pow(delta, s);
        let n = libm::floor(libm::pow(delta, -s) + 1e-9) as usize;
        let c = ap_product_covering(n, rho, FOLD, delta)?;
        counts.push(c.count as f64);
        rows.push(serde_json::json!({ "delta": delta, "N": n, "sum_cover": c.sum_cover, "square_cover": c.square_cover, "count": c.count }));
    }
    let fit = out.fit("product_covering_vs_delta", &deltas, &counts, cfg.seed)?;
    let target = -(3.0 * s).min(1.0 + s);
    out.checks.push(Check::le("sharpness_slope_deviation", (fit.slope - target).abs(), SLOPE_BAND));
    out.put("target_slope", &target)?;
    out.put("coverings", &rows)?;
    Ok(out)
}
