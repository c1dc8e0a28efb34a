//! The summation kernel. A block of `mu_hat` values on a tensor grid is the
//! complex matrix product `E2 · E1` with `E2[r][j] = w_j e(-y_j η_r)` and
//! `E1[j][c] = e(-t_j ξ_c)`, where `e(x) = e^{2πi x}`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::discretized::{Atom, FrostmanMeasure};
use crate::math;
use crate::Point;

/// `mu_hat(ξ)` by a plain sum over atoms.
pub fn mu_hat_at(mu: &FrostmanMeasure, xi: Point) -> Complex64 {
    let (mut re, mut im) = (math::KahanSum::default(), math::KahanSum::default());
    for a in mu.atoms() {
        let (c, s) = math::unit_phase(a.point[0] * xi[0] + a.point[1] * xi[1]);
        re.add(a.weight * c);
        im.add(a.weight * s);
    }
    Complex64::new(re.value(), im.value())
}

/// Evaluates rows of `mu_hat` at fixed first coordinates `xs`.
pub(crate) struct RowEvaluator {
    weights: Vec<f64>,
    heights: Vec<f64>,
    cols: usize,
    /// `k × cols`, row-major.
    e1: Vec<[f64; 2]>,
}

impl RowEvaluator {
    pub(crate) fn new(atoms: &[Atom], xs: &[f64]) -> Self {
        let cols = xs.len();
        let mut e1 = Vec::with_capacity(atoms.len() * cols);
        for a in atoms {
            let t = a.point[0];
            e1.extend(xs.iter().map(|&x| {
                let (c, s) = math::unit_phase(t * x);
                [c, s]
            }));
        }
        RowEvaluator {
            weights: atoms.iter().map(|a| a.weight).collect(),
            heights: atoms.iter().map(|a| a.point[1]).collect(),
            cols,
            e1,
        }
    }

    pub(crate) fn cols(&self) -> usize {
        self.cols
    }

    /// Writes `mu_hat(xs[c], ys[r])` to `out[r * cols + c]`.
    pub(crate) fn eval(&self, ys: &[f64], out: &mut Vec<Complex64>) {
        let (rows, k, cols) = (ys.len(), self.weights.len(), self.cols);
        out.clear();
        out.resize(rows * cols, Complex64::new(0.0, 0.0));
        if k == 0 || rows == 0 || cols == 0 {
            return;
        }
        let mut e2 = vec![[0.0f64; 2]; rows * k];
        for (r, &y) in ys.iter().enumerate() {
            for j in 0..k {
                let (c, s) = math::unit_phase(self.heights[j] * y);
                e2[r * k + j] = [self.weights[j] * c, self.weights[j] * s];
            }
        }
        // SAFETY: Complex64 is #[repr(C)] { re, im }, layout-identical to
        // [f64; 2]; all three buffers have exactly the extents passed below.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                rows,
                k,
                cols,
                [1.0, 0.0],
                e2.as_ptr(),
                k as isize,
                1,
                self.e1.as_ptr(),
                cols as isize,
                1,
                [0.0, 0.0],
                out.as_mut_ptr() as *mut [f64; 2],
                cols as isize,
                1,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretized::Atom;

    #[test]
    fn gemm_matches_plain_sum() {
        let atoms: Vec<Atom> = (0..7)
            .map(|i| {
                let t = -0.9 + 0.27 * i as f64;
                Atom { point: [t, t * t], weight: 0.1 + 0.05 * i as f64 }
            })
            .collect();
        let mu = FrostmanMeasure::new(atoms.clone(), 0.01).unwrap();
        let xs: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.37).collect();
        let ys = [-3.5, 0.0, 1.25, 40.0];
        let ev = RowEvaluator::new(&atoms, &xs);
        let mut out = Vec::new();
        ev.eval(&ys, &mut out);
        for (r, &y) in ys.iter().enumerate() {
            for (c, &x) in xs.iter().enumerate() {
                let d = (out[r * xs.len() + c] - mu_hat_at(&mu, [x, y])).norm();
                assert!(d < 1e-13, "{d}");
            }
        }
    }

    #[test]
    fn empty_measure_is_zero() {
        let ev = RowEvaluator::new(&[], &[0.0, 1.0]);
        let mut out = Vec::new();
        ev.eval(&[0.0], &mut out);
        assert_eq!(out, vec![Complex64::new(0.0, 0.0); 2]);
    }
}
