use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::RowEvaluator;
use crate::discretized::FrostmanMeasure;
use crate::error::{param, resource};
use crate::math::{self, KahanSum};
use crate::{par, Point, Result};

/// Coarsest admissible grid spacing.
pub const MAX_SPACING: f64 = 0.125;
pub const DEFAULT_SPACING: f64 = 0.0625;
/// Largest stored grid, in bytes, unless the caller says otherwise.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Rows handed to one matrix product.
const ROW_BLOCK: usize = 32;

/// Samples of `mu_hat` at `(i h, j h)`, `|i|, |j| <= M = floor(R/h)`, with
/// zeros outside the closed disc of radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierGrid {
    radius: f64,
    spacing: f64,
    half: usize,
    /// Row-major in `j` then `i`, both running from `-M` to `M`.
    values: Vec<Complex64>,
    mass_bound: f64,
    support_radius: f64,
}

fn check_grid(radius: f64, spacing: f64) -> Result<usize> {
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(param!("grid radius must be >= 1, got {radius}"));
    }
    if !(spacing > 0.0 && spacing <= MAX_SPACING) {
        return Err(param!("grid spacing must lie in (0, {MAX_SPACING}], got {spacing}"));
    }
    Ok(math::floor(radius / spacing * (1.0 + 1e-12)) as usize)
}

/// `(R/h)^2`, compared against `i^2 + j^2` to decide disc membership.
fn disc_limit(radius: f64, spacing: f64) -> f64 {
    let q = radius / spacing;
    q * q
}

#[inline]
fn in_disc(i: i64, j: i64, limit: f64) -> bool {
    ((i * i + j * j) as f64) <= limit
}

/// First-order midpoint-rule error bound for `∫_{B(R)} |mu_hat|^p`:
/// boundary cells contribute at most `sup|f|` times the area of a `√2 h`
/// band around the circle, interior cells at most `h/√2 · sup|∇f|` per unit
/// area, with `sup|f| <= m^p` and `|∇f| <= 2π p X m^p`.
fn quad_error_bound(radius: f64, spacing: f64, p: f64, mass: f64, support: f64) -> f64 {
    let sup = math::pow(mass, p);
    let pi = core::f64::consts::PI;
    let boundary = 2.0 * pi * radius * core::f64::consts::SQRT_2 * spacing * sup;
    let interior = pi * radius * radius * spacing / core::f64::consts::SQRT_2 * 2.0 * pi * p * support * sup;
    boundary + interior
}

#[inline]
fn power(v: Complex64, p: f64) -> f64 {
    let n2 = v.norm_sqr();
    if p == 4.0 {
        n2 * n2
    } else if p == 2.0 {
        n2
    } else {
        math::pow(n2, 0.5 * p)
    }
}

impl FourierGrid {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `M`; the grid has `(2M + 1)^2` samples.
    pub fn half(&self) -> usize {
        self.half
    }

    pub fn side(&self) -> usize {
        2 * self.half + 1
    }

    /// Row-major samples, `j` outer, `i` inner.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn index(&self, i: i64, j: i64) -> usize {
        let m = self.half as i64;
        ((j + m) as usize) * self.side() + (i + m) as usize
    }

    /// Sample at `(i h, j h)`.
    pub fn value(&self, i: i64, j: i64) -> Complex64 {
        self.values[self.index(i, j)]
    }

    pub fn xi(&self, i: i64, j: i64) -> Point {
        [i as f64 * self.spacing, j as f64 * self.spacing]
    }

    pub fn in_disc(&self, i: i64, j: i64) -> bool {
        in_disc(i, j, disc_limit(self.radius, self.spacing))
    }

    /// `max |mu_hat(-ξ) - conj(mu_hat(ξ))|` over the grid.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let m = self.half as i64;
        let mut worst: f64 = 0.0;
        for j in -m..=m {
            for i in -m..=m {
                worst = worst.max((self.value(-i, -j) - self.value(i, j).conj()).norm());
            }
        }
        worst
    }

    /// Samples inside the disc as `(i, j, value)`.
    pub fn disc_samples(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let m = self.half as i64;
        let limit = disc_limit(self.radius, self.spacing);
        (-m..=m).flat_map(move |j| {
            (-m..=m).filter(move |&i| in_disc(i, j, limit)).map(move |i| (i, j, self.value(i, j)))
        })
    }
}

/// [`evaluate_mu_hat_with_budget`] with [`DEFAULT_MEMORY_BUDGET`].
pub fn evaluate_mu_hat(mu: &FrostmanMeasure, radius: f64, spacing: f64) -> Result<FourierGrid> {
    evaluate_mu_hat_with_budget(mu, radius, spacing, DEFAULT_MEMORY_BUDGET)
}

/// Stores `mu_hat` on the grid of [`FourierGrid`]. Rows with `ξ2 < 0` are
/// filled by conjugation, so the grid is exactly conjugate-symmetric.
pub fn evaluate_mu_hat_with_budget(
    mu: &FrostmanMeasure,
    radius: f64,
    spacing: f64,
    budget_bytes: usize,
) -> Result<FourierGrid> {
    let half = check_grid(radius, spacing)?;
    let side = 2 * half + 1;
    let needed = (side as u128) * (side as u128) * core::mem::size_of::<Complex64>() as u128;
    if needed > budget_bytes as u128 {
        return Err(resource!(
            "grid of {side}x{side} samples needs {needed} bytes, over the budget of {budget_bytes} bytes"
        ));
    }
    let m = half as i64;
    let xs: Vec<f64> = (-m..=m).map(|i| i as f64 * spacing).collect();
    let eval = RowEvaluator::new(mu.atoms(), &xs);
    let blocks = (half + 1).div_ceil(ROW_BLOCK);
    let rows: Vec<Vec<Complex64>> = par::map(blocks, |b| {
        let lo = b * ROW_BLOCK;
        let hi = (lo + ROW_BLOCK).min(half + 1);
        let ys: Vec<f64> = (lo..hi).map(|j| j as f64 * spacing).collect();
        let mut out = Vec::new();
        eval.eval(&ys, &mut out);
        out
    });

    let mut values = alloc::vec![Complex64::new(0.0, 0.0); side * side];
    let limit = disc_limit(radius, spacing);
    for (b, block) in rows.iter().enumerate() {
        for (r, row) in block.chunks_exact(side).enumerate() {
            let j = (b * ROW_BLOCK + r) as i64;
            for (c, &v) in row.iter().enumerate() {
                let i = c as i64 - m;
                if !in_disc(i, j, limit) {
                    continue;
                }
                values[((j + m) as usize) * side + c] = v;
                if j > 0 {
                    values[((m - j) as usize) * side + (m - i) as usize] = v.conj();
                }
            }
        }
    }
    Ok(FourierGrid {
        radius,
        spacing,
        half,
        values,
        mass_bound: mu.weight_l1(),
        support_radius: mu.support_radius(),
    })
}

/// Norm of `mu_hat` on `B(R)` with its quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub p: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub h: f64,
    /// `(∫_{B(R)} |mu_hat|^p)^{1/p}`.
    pub value: f64,
    /// `∫_{B(R)} |mu_hat|^p`.
    pub integral: f64,
    /// Bound on the error of `integral`.
    pub quad_error_bound: f64,
}

/// Midpoint-rule `L^p(B(R))` norm of the stored grid.
pub fn lp_norm_ball(grid: &FourierGrid, p: f64) -> Result<NormReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(param!("exponent p must be finite and >= 1, got {p}"));
    }
    let mut sum = KahanSum::default();
    for (_, _, v) in grid.disc_samples() {
        sum.add(power(v, p));
    }
    let h = grid.spacing;
    let integral = sum.value() * h * h;
    Ok(NormReport {
        p,
        radius: grid.radius,
        h,
        value: math::pow(integral, 1.0 / p),
        integral,
        quad_error_bound: quad_error_bound(grid.radius, h, p, grid.mass_bound, grid.support_radius),
    })
}

/// `∫_{B(R)} |mu_hat|^p` for one radius of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallIntegral {
    #[serde(rename = "R")]
    pub radius: f64,
    pub integral: f64,
    /// Grid samples inside the disc.
    pub samples: u64,
    pub quad_error_bound: f64,
}

/// `∫_{B(R)} |mu_hat|^p` for every `R` in `radii`, in one streaming pass on
/// the grid of spacing `h` without storing it. Agrees with
/// [`lp_norm_ball`] on the same grid up to summation order.
pub fn ball_power_integrals(mu: &FrostmanMeasure, radii: &[f64], spacing: f64, p: f64) -> Result<Vec<BallIntegral>> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(param!("exponent p must be finite and >= 1, got {p}"));
    }
    if radii.is_empty() {
        return Ok(Vec::new());
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r_max = sorted[sorted.len() - 1];
    let half = check_grid(sorted[0], spacing).and(check_grid(r_max, spacing))?;
    let limits: Vec<f64> = sorted.iter().map(|&r| disc_limit(r, spacing)).collect();

    let m = half as i64;
    let xs: Vec<f64> = (-m..=m).map(|i| i as f64 * spacing).collect();
    let eval = RowEvaluator::new(mu.atoms(), &xs);
    let bins = limits.len();
    let blocks = (half + 1).div_ceil(ROW_BLOCK);
    let partial: Vec<(Vec<KahanSum>, Vec<u64>)> = par::map(blocks, |b| {
        let lo = b * ROW_BLOCK;
        let hi = (lo + ROW_BLOCK).min(half + 1);
        let ys: Vec<f64> = (lo..hi).map(|j| j as f64 * spacing).collect();
        let mut out = Vec::new();
        eval.eval(&ys, &mut out);
        let mut sums = alloc::vec![KahanSum::default(); bins];
        let mut counts = alloc::vec![0u64; bins];
        for (r, row) in out.chunks_exact(eval.cols()).enumerate() {
            let j = (lo + r) as i64;
            let mult = if j == 0 { 1.0 } else { 2.0 };
            for (c, &v) in row.iter().enumerate() {
                let i = c as i64 - m;
                let q = (i * i + j * j) as f64;
                let k = limits.partition_point(|&lim| lim < q);
                if k < bins {
                    sums[k].add(mult * power(v, p));
                    counts[k] += mult as u64;
                }
            }
        }
        (sums, counts)
    });
    let mut sums = alloc::vec![KahanSum::default(); bins];
    let mut counts = alloc::vec![0u64; bins];
    for (s, c) in &partial {
        for k in 0..bins {
            sums[k].merge(&s[k]);
            counts[k] += c[k];
        }
    }
    let (mass, support) = (mu.weight_l1(), mu.support_radius());
    let mut acc = KahanSum::default();
    let mut samples = 0u64;
    let mut out = Vec::with_capacity(bins);
    for k in 0..bins {
        acc.merge(&sums[k]);
        samples += counts[k];
        out.push(BallIntegral {
            radius: sorted[k],
            integral: acc.value() * spacing * spacing,
            samples,
            quad_error_bound: quad_error_bound(sorted[k], spacing, p, mass, support),
        });
    }
    Ok(out)
}
