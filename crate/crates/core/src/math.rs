//! Thin layer over `libm` so results are identical with and without `std`.

pub(crate) use libm::{ceil, cos, fabs as abs, floor, pow, rint, sin, sqrt};

use crate::Point;

pub(crate) const TAU: f64 = core::f64::consts::TAU;

/// Relative slack applied to closed-ball radius tests, so that radii landing
/// exactly on a grid value survive decimal round-off (e.g. `0.1 * 3`).
pub(crate) const RADIUS_SLACK: f64 = 1e-12;

#[inline]
pub(crate) fn dist2(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

#[inline]
pub(crate) fn dist(a: Point, b: Point) -> f64 {
    sqrt(dist2(a, b))
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    sqrt(a[0] * a[0] + a[1] * a[1])
}

/// `e^{-2 pi i x}` as `(cos, sin)` of the negated phase, with the argument
/// reduced mod 1 first so large frequencies keep full precision.
#[inline]
pub(crate) fn unit_phase(x: f64) -> (f64, f64) {
    let r = x - rint(x);
    let (s, c) = libm::sincos(TAU * r);
    (c, -s)
}

/// Exponent `m` with `x == 2^m`, if `x` is an exact power of two.
pub(crate) fn exact_log2(x: f64) -> Option<i32> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    let (mant, exp) = libm::frexp(x);
    (mant == 0.5).then_some(exp - 1)
}

/// `2^k` exactly.
#[inline]
pub(crate) fn pow2(k: i32) -> f64 {
    libm::ldexp(1.0, k)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut k = KahanSum::default();
    for x in xs {
        k.add(x);
    }
    k.value()
}
