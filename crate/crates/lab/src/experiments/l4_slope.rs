//! Growth of `∫_{B(R)} |mu_hat|^4` for AP measures, the square-function
//! comparison and the tube-mass sweep.

use parabola_core::discretized::{build_ap_set, uniform_frostman, FrostmanMeasure};
use parabola_core::fourier::{
    ball_power_integrals, cap_decomposition, evaluate_mu_hat_with_budget, square_function_compare, tube_mass_profiles,
};

use super::Output;
use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::io::{grid_dump, grid_table};
use crate::report::Check;

pub const SLOPE_BAND: f64 = 0.25;
pub const SQUARE_SCALES: [f64; 2] = [1.0 / 256.0, 1.0 / 1024.0];
pub const SQUARE_CEILING: f64 = 8.0;
pub const TUBE_SCALE: f64 = 1.0 / 1024.0;
pub const TUBE_CEILING: f64 = 32.0;
pub const TUBE_CAPS: usize = 3;

fn ap_measure(s: f64, delta: f64) -> Result<FrostmanMeasure, LabError> {
    Ok(uniform_frostman(&build_ap_set(s, delta)?, delta)?)
}

/// Square-function ratios at each scale with `R = 1/δ`.
pub fn square_function_checks(s: f64, spacing: f64, out: &mut Output) -> Result<(), LabError> {
    let mut reports = Vec::new();
    for &delta in &SQUARE_SCALES {
        reports.push(square_function_compare(&ap_measure(s, delta)?, delta, 1.0 / delta, spacing)?);
    }
    let lo = reports.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = reports.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    out.checks.push(Check::gt("square_function_min_ratio", lo, 0.0));
    out.checks.push(Check::le("square_function_max_ratio", hi, SQUARE_CEILING));
    out.put("square_function", &reports)
}

/// Largest tube-mass ratio over three nonempty caps (first, middle, last)
/// and widths `√R`, `R^{3/4}`, `R`.
pub fn tube_checks(s: f64, spacing: f64, out: &mut Output) -> Result<(), LabError> {
    let mu = ap_measure(s, TUBE_SCALE)?;
    let dec = cap_decomposition(&mu, TUBE_SCALE)?;
    let filled: Vec<usize> = (0..dec.caps.len()).filter(|&i| !dec.caps[i].atoms.is_empty()).collect();
    let mut picks = vec![filled[0], filled[filled.len() / 2], filled[filled.len() - 1]];
    picks.dedup();
    picks.truncate(TUBE_CAPS);
    let r = 1.0 / TUBE_SCALE;
    let widths = [libm::sqrt(r), libm::pow(r, 0.75), r];
    let mut summary = Vec::new();
    let mut worst = 0.0f64;
    for &cap in &picks {
        for p in tube_mass_profiles(&mu, &dec, cap, &widths, s, spacing)? {
            worst = worst.max(p.ratio);
            summary.push(serde_json::json!({
                "cap": p.cap, "tube_width": p.tube_width, "max_mass": p.max_mass,
                "total": p.total, "reference": p.reference, "ratio": p.ratio,
            }));
        }
    }
    out.checks.push(Check::le("tube_mass_max_ratio", worst, TUBE_CEILING));
    out.put("tube_profiles", &summary)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output, LabError> {
    let mut out = Output::default();
    let (s, delta, h) = (cfg.s, cfg.delta_list[0], cfg.limits.spacing);
    let mu = ap_measure(s, delta)?;

    let mut radii = cfg.r_list.clone();
    radii.sort_by(f64::total_cmp);
    let sweep = ball_power_integrals(&mu, &radii, h, 4.0)?;
    let ys: Vec<f64> = sweep.iter().map(|b| b.integral).collect();
    let fit = out.fit("l4_vs_R", &radii, &ys, cfg.seed)?;
    out.checks.push(Check::le("l4_slope_deviation", (fit.slope - (2.0 - 2.0 * s)).abs(), SLOPE_BAND));
    out.put("target_slope", &(2.0 - 2.0 * s))?;
    out.put("ball_integrals", &sweep)?;

    square_function_checks(s, h, &mut out)?;
    tube_checks(s, h, &mut out)?;

    let grid = evaluate_mu_hat_with_budget(&mu, radii[0], h, cfg.limits.memory_budget)?;
    out.tables.push(grid_table("mu_hat_grid", &grid));
    out.blobs.push(("mu_hat_grid.fgrd".into(), grid_dump(&grid)));
    Ok(out)
}
