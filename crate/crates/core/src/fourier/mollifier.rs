//! The fixed bump `ψ(x, y) = b(x) b(y)`, where `b` is the centred quartic
//! cardinal B-spline rescaled by [`BUMP_SCALE`]. `ψ` is supported in the
//! square `[-√2/2, √2/2]^2 ⊂ B(1)`, has integral 1, and
//! `b_hat(ω) = sinc(π c ω)^5`.

use crate::discretized::FrostmanMeasure;
use crate::error::param;
use crate::math::{self, KahanSum};
use crate::Point;
use crate::Result;
use alloc::vec::Vec;

/// Horizontal scale `c = √2/5` of the one-dimensional factor.
pub const BUMP_SCALE: f64 = core::f64::consts::SQRT_2 / 5.0;

/// `‖ψ‖²_{L²} = (M_10(5)/c)²`, to 12 significant digits.
pub const PSI_L2_SQ: f64 = 2.31574319795;

/// Cardinal B-spline `M_n` of order `n` (degree `n - 1`), supported on
/// `[0, n]`, by the Cox-de Boor recursion.
pub fn cardinal_bspline(n: usize, x: f64) -> f64 {
    if n == 0 || !(x > 0.0 && x < n as f64) {
        return 0.0;
    }
    let k = math::floor(x) as usize;
    // m[i] holds M_order(x - i) for the current order.
    let mut m = alloc::vec![0.0f64; n + 1];
    m[k] = 1.0;
    for order in 2..=n {
        let o = order as f64;
        for i in 0..n {
            let shift = i as f64;
            m[i] = ((x - shift) * m[i] + (shift + o - x) * m[i + 1]) / (o - 1.0);
        }
    }
    m[0]
}

fn factor(u: f64) -> f64 {
    cardinal_bspline(5, u / BUMP_SCALE + 2.5) / BUMP_SCALE
}

fn factor_autocorrelation(u: f64) -> f64 {
    cardinal_bspline(10, u / BUMP_SCALE + 5.0) / BUMP_SCALE
}

fn sinc5(x: f64) -> f64 {
    let v = if x == 0.0 { 1.0 } else { math::sin(x) / x };
    let v2 = v * v;
    v2 * v2 * v
}

/// `ψ(p)`.
pub fn bump(p: Point) -> f64 {
    factor(p[0]) * factor(p[1])
}

/// `(ψ ∗ ψ)(p)`; supported in `[-√2, √2]^2`.
pub fn bump_autocorrelation(p: Point) -> f64 {
    factor_autocorrelation(p[0]) * factor_autocorrelation(p[1])
}

/// `ψ_hat(ξ) = ∫ ψ(x) e^{-2πi x·ξ} dx`, real since `ψ` is even.
pub fn bump_hat(xi: Point) -> f64 {
    let a = core::f64::consts::PI * BUMP_SCALE;
    sinc5(a * xi[0]) * sinc5(a * xi[1])
}

/// `‖μ ∗ ψ_δ‖²_{L²}` with `ψ_δ = δ^{-2} ψ(·/δ)`, as the exact double sum
/// `Σ_{j,k} w_j w_k δ^{-2} (ψ∗ψ)((x_j - x_k)/δ)`.
pub fn mollified_l2(mu: &FrostmanMeasure, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(param!("delta must lie in (0, 1], got {delta}"));
    }
    let mut atoms: Vec<(Point, f64)> = mu.atoms().iter().map(|a| (a.point, a.weight)).collect();
    atoms.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
    let reach = core::f64::consts::SQRT_2 * delta;
    let mut sum = KahanSum::default();
    for (j, &(p, w)) in atoms.iter().enumerate() {
        sum.add(w * w * bump_autocorrelation([0.0, 0.0]));
        for &(q, v) in &atoms[j + 1..] {
            if q[0] - p[0] >= reach {
                break;
            }
            let d = [(p[0] - q[0]) / delta, (p[1] - q[1]) / delta];
            sum.add(2.0 * w * v * bump_autocorrelation(d));
        }
    }
    Ok(sum.value() / (delta * delta))
}
