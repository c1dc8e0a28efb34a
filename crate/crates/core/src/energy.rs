//! δ-approximate additive energies: a brute-force oracle, a bucketed fast
//! path with the same count, and the inequalities built on them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::discretized::{covering_number, covering_number_1d, separation_violation, DiscretizedSet, FrostmanMeasure};
use crate::error::{param, resource};
use crate::fourier::kernel::RowEvaluator;
use crate::fourier::{bump, bump_hat, BUMP_SCALE};
#[cfg(test)]
use crate::fourier::cardinal_bspline;
use num_complex::Complex64;
use crate::math::{self, KahanSum};
use crate::{par, Point, Result};

/// Largest number of `2n`-tuples the oracle will enumerate.
pub const ORACLE_GUARD: f64 = 1e9;
/// Largest number of `n`-fold sums the bucketed path will store.
pub const HASHED_GUARD: f64 = 1e8;
/// Coordinates within this many grid units of an integer count as on the
/// δ-grid.
const GRID_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    Oracle,
    Hashed,
}

/// Number of `2n`-tuples with `|Σ x_i - Σ y_i| <= tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub n: usize,
    pub delta_tol: f64,
    pub count: u64,
    pub method: EnergyMethod,
    /// Wall time; 0 without the `std` feature.
    pub runtime_ns: u64,
}

struct Timer {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Timer {
    fn start() -> Self {
        Timer {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed_ns(&self) -> u64 {
        #[cfg(feature = "std")]
        {
            self.start.elapsed().as_nanos() as u64
        }
        #[cfg(not(feature = "std"))]
        0
    }
}

/// Tuple sums either exactly in δ-grid units or in floating point.
enum Sums {
    Grid { sums: Vec<[i64; 2]>, q: f64 },
    Float { sums: Vec<Point>, tol: f64 },
}

fn grid_coords(points: &[Point], delta: f64) -> Option<Vec<[i64; 2]>> {
    points
        .iter()
        .map(|p| {
            let mut out = [0i64; 2];
            for k in 0..2 {
                let u = p[k] / delta;
                let r = math::rint(u);
                if math::abs(u - r) > GRID_SNAP || math::abs(r) > 1e15 {
                    return None;
                }
                out[k] = r as i64;
            }
            Some(out)
        })
        .collect()
}

/// Visits every tuple of `factors` in lexicographic index order.
fn odometer(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut idx = alloc::vec![0usize; sizes.len()];
    loop {
        visit(&idx);
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn tuple_sums_grid(factors: &[&[[i64; 2]]]) -> Vec<[i64; 2]> {
    let sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let mut out = Vec::new();
    odometer(&sizes, |idx| {
        let mut s = [0i64; 2];
        for (f, &i) in factors.iter().zip(idx) {
            s[0] += f[i][0];
            s[1] += f[i][1];
        }
        out.push(s);
    });
    out
}

fn tuple_sums_float(factors: &[&[Point]]) -> Vec<Point> {
    let sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let mut out = Vec::new();
    odometer(&sizes, |idx| {
        let mut s = [0.0f64; 2];
        for (f, &i) in factors.iter().zip(idx) {
            s[0] += f[i][0];
            s[1] += f[i][1];
        }
        out.push(s);
    });
    out
}

#[inline]
fn near_grid(a: [i64; 2], b: [i64; 2], q: f64) -> bool {
    let dx = (a[0] - b[0]) as i128;
    let dy = (a[1] - b[1]) as i128;
    ((dx * dx + dy * dy) as f64) <= q * q
}

#[inline]
fn near_float(a: Point, b: Point, tol: f64) -> bool {
    math::dist(a, b) <= tol
}

fn product_size(factors: &[usize]) -> f64 {
    factors.iter().map(|&s| s as f64).product()
}

/// The `n`-fold sums of `left` and `right` factor lists, on the δ-grid when
/// every coordinate is a δ-multiple.
fn build_sums(left: &[&[Point]], right: &[&[Point]], delta: f64, tol: f64) -> Sums {
    let all: Vec<Point> = left.iter().chain(right).flat_map(|f| f.iter().copied()).collect();
    match grid_coords(&all, delta) {
        Some(_) => {
            let l: Vec<Vec<[i64; 2]>> = left.iter().map(|f| grid_coords(f, delta).unwrap()).collect();
            let r: Vec<Vec<[i64; 2]>> = right.iter().map(|f| grid_coords(f, delta).unwrap()).collect();
            let mut sums = tuple_sums_grid(&l.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
            sums.extend(tuple_sums_grid(&r.iter().map(|v| v.as_slice()).collect::<Vec<_>>()));
            Sums::Grid { sums, q: tol / delta }
        }
        None => {
            let mut sums = tuple_sums_float(left);
            sums.extend(tuple_sums_float(right));
            Sums::Float { sums, tol }
        }
    }
}

/// Ordered pairs `(a, b)` from `sums[..split] × sums[split..]` within the
/// tolerance, counted through cell buckets.
fn count_bucketed(sums: &Sums, split: usize) -> u64 {
    match sums {
        Sums::Grid { sums, q } => {
            let (l, r) = sums.split_at(split);
            let side = if *q == 0.0 { 1 } else { (math::ceil(*q) as i64).max(1) };
            let reach = if *q == 0.0 { 0 } else { 1 };
            let key = |p: [i64; 2]| [p[0].div_euclid(side), p[1].div_euclid(side)];
            let near = |a: [i64; 2], b: [i64; 2]| near_grid(a, b, *q);
            count_in_cells(l, r, key, reach, near)
        }
        Sums::Float { sums, tol } => {
            let (l, r) = sums.split_at(split);
            let key = |p: Point| {
                if *tol == 0.0 {
                    // Exact grouping; +0.0 folds -0.0 into 0.0.
                    [(p[0] + 0.0).to_bits() as i64, (p[1] + 0.0).to_bits() as i64]
                } else {
                    let c = tol * (1.0 + 1e-9);
                    [math::floor(p[0] / c) as i64, math::floor(p[1] / c) as i64]
                }
            };
            let reach = if *tol == 0.0 { 0 } else { 1 };
            let near = |a: Point, b: Point| near_float(a, b, *tol);
            count_in_cells(l, r, key, reach, near)
        }
    }
}

fn count_in_cells<T, K, N>(left: &[T], right: &[T], key: K, reach: i64, near: N) -> u64
where
    T: Copy + Sync + Send,
    K: Fn(T) -> [i64; 2] + Sync + Send,
    N: Fn(T, T) -> bool + Sync + Send,
{
    let mut cells: Vec<([i64; 2], T)> = right.iter().map(|&p| (key(p), p)).collect();
    cells.sort_unstable_by_key(|a| a.0);
    const CHUNK: usize = 4096;
    let chunks = left.len().div_ceil(CHUNK);
    let partial = par::map(chunks, |c| {
        let mut count = 0u64;
        for &a in &left[c * CHUNK..((c + 1) * CHUNK).min(left.len())] {
            let k = key(a);
            for dx in -reach..=reach {
                for dy in -reach..=reach {
                    let target = [k[0].wrapping_add(dx), k[1].wrapping_add(dy)];
                    let lo = cells.partition_point(|e| e.0 < target);
                    count += cells[lo..].iter().take_while(|e| e.0 == target).filter(|e| near(a, e.1)).count() as u64;
                }
            }
        }
        count
    });
    partial.iter().sum()
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(param!("tolerance must be finite and >= 0, got {tol}"));
    }
    Ok(())
}

fn check_fold(n: usize) -> Result<()> {
    if n == 0 {
        return Err(param!("fold count must be at least 1"));
    }
    Ok(())
}

/// `E_n(P)` by enumerating every `2n`-tuple.
pub fn additive_energy_oracle(p: &DiscretizedSet, n: usize, tol: f64) -> Result<EnergyReport> {
    check_fold(n)?;
    check_tolerance(tol)?;
    let tuples = libm::pow(p.len() as f64, 2.0 * n as f64);
    if tuples > ORACLE_GUARD {
        return Err(resource!(
            "oracle would enumerate |P|^(2n) = {tuples:.3e} tuples, above the guard {ORACLE_GUARD:.0e}; use the hashed path"
        ));
    }
    let timer = Timer::start();
    let factors: Vec<&[Point]> = (0..n).map(|_| p.points()).collect();
    let sums = build_sums(&factors, &factors, p.delta(), tol);
    let count = match &sums {
        Sums::Grid { sums, q } => all_pairs(&sums[..sums.len() / 2], &sums[sums.len() / 2..], |a, b| near_grid(a, b, *q)),
        Sums::Float { sums, tol } => {
            all_pairs(&sums[..sums.len() / 2], &sums[sums.len() / 2..], |a, b| near_float(a, b, *tol))
        }
    };
    Ok(EnergyReport { n, delta_tol: tol, count, method: EnergyMethod::Oracle, runtime_ns: timer.elapsed_ns() })
}

fn all_pairs<T: Copy + Sync + Send>(left: &[T], right: &[T], near: impl Fn(T, T) -> bool + Sync + Send) -> u64 {
    par::map(left.len(), |i| right.iter().filter(|&&b| near(left[i], b)).count() as u64).iter().sum()
}

/// `E_n(P)` by bucketing the `n`-fold sums in cells of side `tol` and
/// checking every candidate pair in neighbouring cells. Same count as
/// [`additive_energy_oracle`].
pub fn additive_energy_hashed(p: &DiscretizedSet, n: usize, tol: f64) -> Result<EnergyReport> {
    check_fold(n)?;
    check_tolerance(tol)?;
    let sums = libm::pow(p.len() as f64, n as f64);
    if sums > HASHED_GUARD {
        return Err(resource!("|P|^n = {sums:.3e} sums exceed the guard {HASHED_GUARD:.0e}"));
    }
    let timer = Timer::start();
    let factors: Vec<&[Point]> = (0..n).map(|_| p.points()).collect();
    let built = build_sums(&factors, &factors, p.delta(), tol);
    let count = count_bucketed(&built, p.len().pow(n as u32));
    Ok(EnergyReport { n, delta_tol: tol, count, method: EnergyMethod::Hashed, runtime_ns: timer.elapsed_ns() })
}

/// Number of `2k`-tuples `(x_1..x_k, y_1..y_k)`, `x_i ∈ left[i]`,
/// `y_i ∈ right[i]`, with `|Σx - Σy| <= tol`.
pub fn mixed_tuple_count(left: &[&[Point]], right: &[&[Point]], delta: f64, tol: f64) -> Result<u64> {
    check_tolerance(tol)?;
    let sizes: Vec<usize> = left.iter().chain(right).map(|f| f.len()).collect();
    let (l, r) = sizes.split_at(left.len());
    let biggest = product_size(l).max(product_size(r));
    if biggest > HASHED_GUARD {
        return Err(resource!("{biggest:.3e} tuple sums exceed the guard {HASHED_GUARD:.0e}"));
    }
    let built = build_sums(left, right, delta, tol);
    Ok(count_bucketed(&built, product_size(l) as usize))
}

/// `|P + ... + P|_δ` (`k` summands).
pub fn sumset_covering(p: &DiscretizedSet, k: usize, delta: f64) -> Result<usize> {
    check_fold(k)?;
    let size = libm::pow(p.len() as f64, k as f64);
    if size > HASHED_GUARD {
        return Err(resource!("|P|^k = {size:.3e} sums exceed the guard {HASHED_GUARD:.0e}"));
    }
    let factors: Vec<&[Point]> = (0..k).map(|_| p.points()).collect();
    Ok(covering_number(&tuple_sums_float(&factors), delta)?.count)
}

/// `|kA × kA²|_δ` for `A = {m ρ : 0 <= m < N}`, computed on the lattice:
/// `kA = ρ{0, ..., k(N-1)}` and `kA² = ρ²{sums of k squares below N}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductCovering {
    pub sum_cover: usize,
    pub square_cover: usize,
    /// `sum_cover · square_cover`, the covering of the product by `2δ`
    /// squares.
    pub count: u64,
}

/// Product covering of `kA × kA²` for the arithmetic progression with `n`
/// terms and step `rho`, at scale `delta`.
pub fn ap_product_covering(n: usize, rho: f64, k: usize, delta: f64) -> Result<ProductCovering> {
    check_fold(k)?;
    if n == 0 {
        return Ok(ProductCovering { sum_cover: 0, square_cover: 0, count: 0 });
    }
    if !(delta > 0.0 && rho > 0.0) {
        return Err(param!("step and scale must be positive"));
    }
    let top = k * (n - 1) * (n - 1);
    if top as f64 > HASHED_GUARD {
        return Err(resource!("k (N-1)^2 = {top} exceeds the guard {HASHED_GUARD:.0e}"));
    }
    let sums: Vec<f64> = (0..=k * (n - 1)).map(|m| m as f64 * rho).collect();
    let mut reach = alloc::vec![false; top + 1];
    reach[0] = true;
    for _ in 0..k {
        let mut next = alloc::vec![false; top + 1];
        for (v, _) in reach.iter().enumerate().filter(|(_, &r)| r) {
            for m in 0..n {
                let w = v + m * m;
                if w <= top {
                    next[w] = true;
                }
            }
        }
        reach = next;
    }
    let squares: Vec<f64> = reach.iter().enumerate().filter(|(_, &r)| r).map(|(q, _)| q as f64 * rho * rho).collect();
    let sum_cover = covering_number_1d(&sums, delta);
    let square_cover = covering_number_1d(&squares, delta);
    Ok(ProductCovering { sum_cover, square_cover, count: (sum_cover as u64) * (square_cover as u64) })
}

/// Both sides of `E_n(P) |nP| >= |P|^{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergySumsetReport {
    pub energy: u64,
    pub sumset: u64,
    pub product: u128,
    pub bound: u128,
    pub holds: bool,
}

/// Exact check of `E_n(P) |nP| >= |P|^{2n}` with `tol = 0` on the δ-grid.
pub fn energy_sumset_inequality(p: &DiscretizedSet, n: usize) -> Result<EnergySumsetReport> {
    check_fold(n)?;
    let grid = grid_coords(p.points(), p.delta())
        .ok_or_else(|| param!("coordinates are not integer multiples of delta = {}", p.delta()))?;
    let energy = additive_energy_hashed(p, n, 0.0)?.count;
    let factors: Vec<&[[i64; 2]]> = (0..n).map(|_| grid.as_slice()).collect();
    let sumset = tuple_sums_grid(&factors).into_iter().collect::<BTreeSet<_>>().len() as u64;
    let product = energy as u128 * sumset as u128;
    let bound = (p.len() as u128).pow(2 * n as u32);
    Ok(EnergySumsetReport { energy, sumset, product, bound, holds: product >= bound })
}

/// Pair count for two separated arcs of the parabola.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransversalReport {
    pub count: u64,
    /// Distance between the arcs spanned by the two sets.
    pub tau: f64,
    /// `count · τ / C²`.
    pub ratio: f64,
}

/// `|{(x, y) ∈ P_I × P_J : |(x + x0) ± (y + y0)| <= C δ}|`, with `sign`
/// choosing `±`.
pub fn transversal_pair_count(
    pi: &DiscretizedSet,
    pj: &DiscretizedSet,
    x0: Point,
    y0: Point,
    sign: f64,
    c: f64,
) -> Result<TransversalReport> {
    if sign != 1.0 && sign != -1.0 {
        return Err(param!("sign must be +1 or -1, got {sign}"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(param!("tolerance multiplier must be positive, got {c}"));
    }
    let span = |s: &DiscretizedSet| {
        let ts = s.points().iter().map(|p| p[0]);
        (ts.clone().fold(f64::INFINITY, f64::min), ts.fold(f64::NEG_INFINITY, f64::max))
    };
    let tau = if pi.is_empty() || pj.is_empty() {
        f64::NAN
    } else {
        let (a0, a1) = span(pi);
        let (b0, b1) = span(pj);
        let on_parabola = |t: f64| [t, t * t];
        if a1 < b0 {
            math::dist(on_parabola(a1), on_parabola(b0))
        } else if b1 < a0 {
            math::dist(on_parabola(b1), on_parabola(a0))
        } else {
            return Err(param!("arcs [{a0}, {a1}] and [{b0}, {b1}] overlap in t"));
        }
    };
    let tol = c * pi.delta().max(pj.delta());
    let mut count = 0u64;
    for x in pi.points() {
        let u = [x[0] + x0[0], x[1] + x0[1]];
        for y in pj.points() {
            let v = [sign * (y[0] + y0[0]), sign * (y[1] + y0[1])];
            if math::norm([u[0] + v[0], u[1] + v[1]]) <= tol {
                count += 1;
            }
        }
    }
    let ratio = if count == 0 { 0.0 } else { count as f64 * tau / (c * c) };
    Ok(TransversalReport { count, tau, ratio })
}

/// Output of [`plancherel_energy_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelReport {
    /// `∫_{B(4/δ)} f̂1 f̂2 f̂3 conj(f̂4 f̂5 f̂6)`, real part.
    pub integral: f64,
    /// Bound on the part of the integral outside `B(4/δ)`.
    pub tail_bound: f64,
    /// `δ^{10}` times the number of 6-tuples with
    /// `|(x1+x2+x3) - (x4+x5+x6)| <= 6δ`.
    pub bound: f64,
    pub count: u64,
    pub ratio: f64,
    pub h: f64,
}

/// Coarsest grid spacing for the six-fold product; halved until the
/// Riemann sum is alias-free for the given supports.
pub const PLANCHEREL_SPACING: f64 = 0.125;

/// Smooth version of six atomic measures: `f_i = Σ_j a_j β((x - x_j)/(δ/2))`
/// with density `a_j = w_j/δ²` and `β = ψ/ψ(0)`, so that
/// `0 <= f_i <= 1_{P_i(δ)}` for δ-separated supports. Returns the
/// quadrature of `∫ f̂1 f̂2 f̂3 conj(f̂4 f̂5 f̂6)` over `B(4/δ)` against
/// `δ^{10}` times the 6δ-tuple count.
pub fn plancherel_energy_check(mus: &[FrostmanMeasure; 6], delta: f64) -> Result<PlancherelReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(param!("delta must lie in (0, 1], got {delta}"));
    }
    for (i, mu) in mus.iter().enumerate() {
        if let Some(a) = mu.atoms().iter().find(|a| a.weight / (delta * delta) > 1.0 + 1e-12) {
            return Err(param!("measure {i} has density {} > 1 at {:?}", a.weight / (delta * delta), a.point));
        }
        if let Some((j, k)) = separation_violation(&mu.support(), delta) {
            return Err(param!("measure {i} is not delta-separated (atoms {j} and {k})"));
        }
    }
    let supports: Vec<Vec<Point>> = mus.iter().map(|m| m.support()).collect();
    let refs: Vec<&[Point]> = supports.iter().map(|v| v.as_slice()).collect();
    let count = mixed_tuple_count(&refs[..3], &refs[3..], delta, 6.0 * delta)?;
    let bound = libm::pow(delta, 10.0) * count as f64;

    let eps = 0.5 * delta;
    let peak = bump([0.0, 0.0]);
    let radius = 4.0 / delta;
    let h = alias_free_spacing(mus, eps);
    let half = math::floor(radius / h * (1.0 + 1e-12)) as usize;
    let m = half as i64;
    let limit = (radius / h) * (radius / h);
    let xs: Vec<f64> = (-m..=m).map(|i| i as f64 * h).collect();
    let evals: Vec<RowEvaluator> = mus.iter().map(|mu| RowEvaluator::new(mu.atoms(), &xs)).collect();
    // f̂_i(ξ) = ε² β̂(εξ) Σ_j a_j e(-x_j·ξ) = (ε²/(δ²ψ(0))) ψ̂(εξ) mu_hat_i(ξ).
    let scale = eps * eps / (delta * delta * peak);
    const ROWS: usize = 16;
    let partial: Vec<KahanSum> = par::map((half + 1).div_ceil(ROWS), |b| {
        let rows: Vec<usize> = (b * ROWS..((b + 1) * ROWS).min(half + 1)).collect();
        let ys: Vec<f64> = rows.iter().map(|&j| j as f64 * h).collect();
        let mut prod = alloc::vec![Complex64::new(1.0, 0.0); rows.len() * xs.len()];
        let mut buf = Vec::new();
        for (k, ev) in evals.iter().enumerate() {
            ev.eval(&ys, &mut buf);
            for (p, v) in prod.iter_mut().zip(&buf) {
                *p *= if k < 3 { *v } else { v.conj() };
            }
        }
        let mut acc = KahanSum::default();
        for (r, &j) in rows.iter().enumerate() {
            let mult = if j == 0 { 1.0 } else { 2.0 };
            for (c, &x) in xs.iter().enumerate() {
                let i = c as i64 - m;
                if ((i * i) as f64) + ((j * j) as f64) > limit {
                    continue;
                }
                let damp = bump_hat([eps * x, eps * ys[r]]) * scale;
                let damp3 = damp * damp * damp;
                acc.add(mult * damp3 * damp3 * prod[r * xs.len() + c].re);
            }
        }
        acc
    });
    let mut total = KahanSum::default();
    for p in &partial {
        total.merge(p);
    }
    let integral = total.value() * h * h;

    // |f̂_i| <= scale m_i |ψ̂(εξ)| and |ψ̂(ω)|^6 <= Π_k min(1, (π c ω_k)^{-30});
    // outside B(4/δ) some |ε ξ_k| exceeds √2.
    let masses: f64 = mus.iter().map(|m| scale * m.weight_l1()).product();
    let pc = core::f64::consts::PI * BUMP_SCALE;
    let a = core::f64::consts::SQRT_2;
    let outer = 2.0 * libm::pow(pc, -30.0) * libm::pow(a, -29.0) / 29.0;
    let full = 2.0 / pc * 30.0 / 29.0;
    let tail_bound = masses * 2.0 * outer * full / (eps * eps);

    let ratio = if bound > 0.0 { integral / bound } else if integral == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(PlancherelReport { integral, tail_bound, bound, count, ratio, h })
}

/// Largest `PLANCHEREL_SPACING / 2^k` whose dual lattice `(1/h) Z²` misses
/// the support of `y ↦ ∫ (f1∗f2∗f3)(z) (f4∗f5∗f6)(z - y) dz`, so that the
/// Riemann sum over the whole plane is exact.
fn alias_free_spacing(mus: &[FrostmanMeasure; 6], eps: f64) -> f64 {
    let mut reach: f64 = 0.0;
    for k in 0..2 {
        let (mut hi, mut lo) = (0.0, 0.0);
        for (i, mu) in mus.iter().enumerate() {
            if mu.is_empty() {
                continue;
            }
            let top = mu.atoms().iter().map(|a| a.point[k]).fold(f64::NEG_INFINITY, f64::max);
            let bot = mu.atoms().iter().map(|a| a.point[k]).fold(f64::INFINITY, f64::min);
            if i < 3 {
                hi += top;
                lo += bot;
            } else {
                hi -= bot;
                lo -= top;
            }
        }
        reach = reach.max(math::abs(hi)).max(math::abs(lo));
    }
    // Each bump reaches √2/2 ε per coordinate.
    reach += 6.0 * core::f64::consts::FRAC_1_SQRT_2 * eps;
    let mut h = PLANCHEREL_SPACING;
    while 1.0 / h <= reach {
        h *= 0.5;
    }
    h
}

/// `∫ f1 ∗ f2 ∗ f3 · f4 ∗ f5 ∗ f6` in space for the bumps of
/// [`plancherel_energy_check`]: the six-fold self-convolution of the
/// one-dimensional factor is the order-30 cardinal B-spline.
#[cfg(test)]
fn plancherel_spatial(mus: &[FrostmanMeasure; 6], delta: f64) -> f64 {
    let eps = 0.5 * delta;
    let c = BUMP_SCALE;
    let sixfold = |u: f64| cardinal_bspline(30, u / c + 15.0) / c;
    let peak = bump([0.0, 0.0]);
    let mut total = 0.0;
    let sizes: Vec<usize> = mus.iter().map(|m| m.len()).collect();
    odometer(&sizes, |idx| {
        let mut d = [0.0; 2];
        let mut w = 1.0;
        for (k, (&i, mu)) in idx.iter().zip(mus).enumerate() {
            let a = mu.atoms()[i];
            let sgn = if k < 3 { 1.0 } else { -1.0 };
            d[0] += sgn * a.point[0];
            d[1] += sgn * a.point[1];
            w *= a.weight / (delta * delta);
        }
        let kernel = sixfold(d[0] / eps) * sixfold(d[1] / eps) / (eps * eps);
        total += w * libm::pow(eps * eps / peak, 6.0) * kernel;
    });
    total
}
