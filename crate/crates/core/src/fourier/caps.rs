//! Caps of the parabola at scale `δ` and the quantities built from the cap
//! pieces `μ_θ` on the frequency disc `B(1/δ)`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::grid::MAX_SPACING;
use super::kernel::RowEvaluator;
use crate::discretized::{Atom, FrostmanMeasure};
use crate::error::param;
use crate::math::{self, KahanSum};
use crate::{par, Point, Result};

const ROW_BLOCK: usize = 16;

/// Atoms whose first coordinate lies in `[t_start, t_end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub index: i64,
    pub t_start: f64,
    pub t_end: f64,
    pub atoms: Vec<u32>,
}

impl Cap {
    pub fn centre(&self) -> f64 {
        0.5 * (self.t_start + self.t_end)
    }

    /// Unit normal of the parabola at the cap centre, `(-2t, 1)/√(1+4t²)`.
    pub fn normal(&self) -> Point {
        let t = self.centre();
        let n = math::sqrt(1.0 + 4.0 * t * t);
        [-2.0 * t / n, 1.0 / n]
    }

    /// Unit tangent of the parabola at the cap centre.
    pub fn tangent(&self) -> Point {
        let [a, b] = self.normal();
        [b, -a]
    }
}

/// Partition of the atoms of a measure into caps of `t`-length `√δ`
/// tiling `[-1, 1]` (extended if atoms fall outside).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapDecomposition {
    pub delta: f64,
    pub width: f64,
    pub caps: Vec<Cap>,
}

impl CapDecomposition {
    pub fn nonempty(&self) -> impl Iterator<Item = &Cap> {
        self.caps.iter().filter(|c| !c.atoms.is_empty())
    }

    /// `μ(θ)` for each cap, in cap order.
    pub fn masses(&self, mu: &FrostmanMeasure) -> Vec<f64> {
        self.caps.iter().map(|c| c.atoms.iter().map(|&a| mu.atoms()[a as usize].weight).sum()).collect()
    }
}

/// Splits the atoms of `mu` by first coordinate into intervals
/// `[-1 + k√δ, -1 + (k+1)√δ)`; `t = 1` joins the last cap.
pub fn cap_decomposition(mu: &FrostmanMeasure, delta: f64) -> Result<CapDecomposition> {
    if math::exact_log2(delta).is_none_or(|k| k > 0) {
        return Err(param!("cap decomposition needs a dyadic delta in (0, 1], got {delta}"));
    }
    let width = math::sqrt(delta);
    let nominal = math::ceil(2.0 / width * (1.0 - 1e-12)) as i64;
    let index_of = |t: f64| {
        let k = math::floor((t + 1.0) / width) as i64;
        if k == nominal && t <= 1.0 {
            nominal - 1
        } else {
            k
        }
    };
    let indices: Vec<i64> = mu.atoms().iter().map(|a| index_of(a.point[0])).collect();
    let lo = indices.iter().copied().min().unwrap_or(0).min(0);
    let hi = indices.iter().copied().max().unwrap_or(0).max(nominal - 1);
    let mut caps: Vec<Cap> = (lo..=hi)
        .map(|k| Cap {
            index: k,
            t_start: -1.0 + k as f64 * width,
            t_end: -1.0 + (k + 1) as f64 * width,
            atoms: Vec::new(),
        })
        .collect();
    for (a, &k) in indices.iter().enumerate() {
        caps[(k - lo) as usize].atoms.push(a as u32);
    }
    Ok(CapDecomposition { delta, width, caps })
}

fn cap_atoms(mu: &FrostmanMeasure, cap: &Cap) -> Vec<Atom> {
    cap.atoms.iter().map(|&a| mu.atoms()[a as usize]).collect()
}

fn check_spacing(spacing: f64) -> Result<()> {
    if !(spacing > 0.0 && spacing <= MAX_SPACING) {
        return Err(param!("grid spacing must lie in (0, {MAX_SPACING}], got {spacing}"));
    }
    Ok(())
}

/// Half-grid geometry shared by the streaming passes: rows `j = 0..=M`,
/// columns `i = -M..=M`, disc test `i² + j² <= (R/h)²`.
struct HalfGrid {
    half: usize,
    spacing: f64,
    limit: f64,
    xs: Vec<f64>,
}

impl HalfGrid {
    fn new(radius: f64, spacing: f64) -> Self {
        let half = math::floor(radius / spacing * (1.0 + 1e-12)) as usize;
        let m = half as i64;
        let q = radius / spacing;
        HalfGrid { half, spacing, limit: q * q, xs: (-m..=m).map(|i| i as f64 * spacing).collect() }
    }

    fn blocks(&self) -> usize {
        (self.half + 1).div_ceil(ROW_BLOCK)
    }

    fn rows(&self, block: usize) -> core::ops::Range<usize> {
        let lo = block * ROW_BLOCK;
        lo..(lo + ROW_BLOCK).min(self.half + 1)
    }

    fn ys(&self, block: usize) -> Vec<f64> {
        self.rows(block).map(|j| j as f64 * self.spacing).collect()
    }

    /// Columns of row `j` inside the disc, as an index range into `xs`.
    fn span(&self, j: usize) -> core::ops::Range<usize> {
        let jj = (j * j) as f64;
        let m = self.half as i64;
        let mut w = m;
        while w >= 0 && ((w * w) as f64) + jj > self.limit {
            w -= 1;
        }
        if w < 0 {
            return 0..0;
        }
        ((m - w) as usize)..((m + w) as usize + 1)
    }
}

/// Quadrature of the square-function inequality on `B(R)`, `R = 1/δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareFunctionReport {
    #[serde(rename = "R")]
    pub radius: f64,
    pub h: f64,
    pub caps: usize,
    /// `∫_{B(R)} |mu_hat|^4`.
    pub lhs: f64,
    /// `∫_{B(R)} (Σ_θ |mu_hat_θ|^2)^2`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Compares `∫|mu_hat|^4` with `∫(Σ_θ |mu_hat_θ|²)²` over `B(R)`. Requires
/// `R = 1/δ`. Single-atom caps contribute the constant `w²`.
pub fn square_function_compare(mu: &FrostmanMeasure, delta: f64, radius: f64, spacing: f64) -> Result<SquareFunctionReport> {
    check_spacing(spacing)?;
    if !(radius * delta - 1.0).abs().le(&1e-12) {
        return Err(param!("square function comparison needs R = 1/delta, got R = {radius}, delta = {delta}"));
    }
    let decomposition = cap_decomposition(mu, delta)?;
    let grid = HalfGrid::new(radius, spacing);
    let total = RowEvaluator::new(mu.atoms(), &grid.xs);
    let mut flat = 0.0;
    let mut pieces = Vec::new();
    for cap in decomposition.nonempty() {
        if cap.atoms.len() == 1 {
            let w = mu.atoms()[cap.atoms[0] as usize].weight;
            flat += w * w;
        } else {
            pieces.push(RowEvaluator::new(&cap_atoms(mu, cap), &grid.xs));
        }
    }
    let partial: Vec<(KahanSum, KahanSum)> = par::map(grid.blocks(), |b| {
        let ys = grid.ys(b);
        let mut tot = Vec::new();
        total.eval(&ys, &mut tot);
        let cols = grid.xs.len();
        let mut sq = alloc::vec![flat; tot.len()];
        let mut buf = Vec::new();
        for piece in &pieces {
            piece.eval(&ys, &mut buf);
            for (s, v) in sq.iter_mut().zip(&buf) {
                *s += v.norm_sqr();
            }
        }
        let (mut lhs, mut rhs) = (KahanSum::default(), KahanSum::default());
        for (r, j) in grid.rows(b).enumerate() {
            let mult = if j == 0 { 1.0 } else { 2.0 };
            for c in grid.span(j) {
                let n2 = tot[r * cols + c].norm_sqr();
                let s = sq[r * cols + c];
                lhs.add(mult * n2 * n2);
                rhs.add(mult * s * s);
            }
        }
        (lhs, rhs)
    });
    let (mut lhs, mut rhs) = (KahanSum::default(), KahanSum::default());
    for (l, r) in &partial {
        lhs.merge(l);
        rhs.merge(r);
    }
    let cell = spacing * spacing;
    let (lhs, rhs) = (lhs.value() * cell, rhs.value() * cell);
    Ok(SquareFunctionReport {
        radius,
        h: spacing,
        caps: decomposition.nonempty().count(),
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
    })
}

/// Grid `L²` mass of `mu_hat_θ` in slabs of width `Δ` (measured along the
/// cap tangent, elongated along the cap normal) tiling `B(R)`, `R = 1/δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeMassProfile {
    pub cap: i64,
    pub direction: Point,
    pub tube_width: f64,
    /// `(slab index, mass)` for the slabs meeting the disc, in index order.
    pub masses: Vec<(u32, f64)>,
    /// `‖mu_hat_θ‖²_{L²(B(R))}` on the grid.
    pub total: f64,
    pub max_mass: f64,
    /// `Δ · δ^{s-1}`.
    pub reference: f64,
    /// `max_mass / reference`.
    pub ratio: f64,
}

/// [`tube_mass_profiles`] for one width.
pub fn tube_mass_profile(
    mu: &FrostmanMeasure,
    decomposition: &CapDecomposition,
    cap: usize,
    width: f64,
    s: f64,
    spacing: f64,
) -> Result<TubeMassProfile> {
    Ok(tube_mass_profiles(mu, decomposition, cap, &[width], s, spacing)?.remove(0))
}

/// Slab masses of cap number `cap` (position in `decomposition.caps`) for
/// each width in `widths`, from one pass over the grid. Slab `k` holds the
/// points with `k Δ <= ξ·τ + R < (k+1) Δ`.
pub fn tube_mass_profiles(
    mu: &FrostmanMeasure,
    decomposition: &CapDecomposition,
    cap: usize,
    widths: &[f64],
    s: f64,
    spacing: f64,
) -> Result<Vec<TubeMassProfile>> {
    check_spacing(spacing)?;
    let delta = decomposition.delta;
    let radius = 1.0 / delta;
    let theta = decomposition
        .caps
        .get(cap)
        .ok_or_else(|| param!("cap {cap} out of range ({} caps)", decomposition.caps.len()))?;
    if theta.atoms.is_empty() {
        return Err(param!("cap {cap} holds no atoms"));
    }
    let lo_w = math::sqrt(radius) * (1.0 - 1e-12);
    let hi_w = radius * (1.0 + 1e-12);
    if let Some(&w) = widths.iter().find(|&&w| !(w >= lo_w && w <= hi_w)) {
        return Err(param!("tube width {w} outside [sqrt(R), R] for R = {radius}"));
    }
    let grid = HalfGrid::new(radius, spacing);
    let atoms = cap_atoms(mu, theta);
    let single = (atoms.len() == 1).then(|| atoms[0].weight * atoms[0].weight);
    let eval = RowEvaluator::new(&atoms, &grid.xs);
    let tau = theta.tangent();
    let counts: Vec<usize> = widths.iter().map(|&w| math::ceil(2.0 * radius / w * (1.0 - 1e-12)) as usize).collect();
    let slab = |u: f64, w: f64, n: usize| (math::floor((u + radius) / w).max(0.0) as usize).min(n - 1);

    let partial: Vec<Vec<Vec<KahanSum>>> = par::map(grid.blocks(), |b| {
        let ys = grid.ys(b);
        let mut vals = Vec::new();
        if single.is_none() {
            eval.eval(&ys, &mut vals);
        }
        let cols = grid.xs.len();
        let mut acc: Vec<Vec<KahanSum>> = counts.iter().map(|&n| alloc::vec![KahanSum::default(); n]).collect();
        for (r, j) in grid.rows(b).enumerate() {
            let y = ys[r];
            for c in grid.span(j) {
                let m2 = match single {
                    Some(w2) => w2,
                    None => vals[r * cols + c].norm_sqr(),
                };
                let u = grid.xs[c] * tau[0] + y * tau[1];
                for (k, &w) in widths.iter().enumerate() {
                    acc[k][slab(u, w, counts[k])].add(m2);
                    if j > 0 {
                        acc[k][slab(-u, w, counts[k])].add(m2);
                    }
                }
            }
        }
        acc
    });

    let cell = spacing * spacing;
    let mut out = Vec::with_capacity(widths.len());
    for (k, &w) in widths.iter().enumerate() {
        let mut sums = alloc::vec![KahanSum::default(); counts[k]];
        for part in &partial {
            for (acc, p) in sums.iter_mut().zip(&part[k]) {
                acc.merge(p);
            }
        }
        let masses: Vec<(u32, f64)> = sums.iter().enumerate().map(|(i, s)| (i as u32, s.value() * cell)).collect();
        let total = math::kahan_sum(masses.iter().map(|m| m.1));
        let max_mass = masses.iter().map(|m| m.1).fold(0.0, f64::max);
        let reference = w * math::pow(delta, s - 1.0);
        out.push(TubeMassProfile {
            cap: theta.index,
            direction: theta.normal(),
            tube_width: w,
            masses,
            total,
            max_mass,
            reference,
            ratio: max_mass / reference,
        });
    }
    Ok(out)
}
