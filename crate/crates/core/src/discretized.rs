//! δ-separated point sets, covering numbers, (δ,s,C)-set constants and the
//! explicit arithmetic-progression sets and measures.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::param;
use crate::math::{self, RADIUS_SLACK};
use crate::{par, Point, Result};

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(param!("delta must lie in (0, 1], got {delta}"))
    }
}

/// A finite δ-separated point cloud in the line or the plane.
///
/// One-dimensional sets store `[x, 0.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedSet {
    points: Vec<Point>,
    delta: f64,
    ambient_dim: usize,
}

impl DiscretizedSet {
    /// Validates finiteness, the dimension tag and δ-separation.
    pub fn new(points: Vec<Point>, delta: f64, ambient_dim: usize) -> Result<Self> {
        check_delta(delta)?;
        if ambient_dim != 1 && ambient_dim != 2 {
            return Err(param!("ambient dimension must be 1 or 2, got {ambient_dim}"));
        }
        for p in &points {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(param!("non-finite point {p:?}"));
            }
            if ambient_dim == 1 && p[1] != 0.0 {
                return Err(param!("one-dimensional set has a point off the axis: {p:?}"));
            }
        }
        if let Some((i, j)) = separation_violation(&points, delta) {
            return Err(param!(
                "points {i} {:?} and {j} {:?} are closer than delta = {delta}",
                points[i],
                points[j]
            ));
        }
        Ok(DiscretizedSet { points, delta, ambient_dim })
    }

    /// A set of reals.
    pub fn on_line(xs: &[f64], delta: f64) -> Result<Self> {
        Self::new(xs.iter().map(|&x| [x, 0.0]).collect(), delta, 1)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Position of `p` in the set (exact match).
    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.points.iter().position(|q| *q == p)
    }

    /// Same set with one more point; fails if separation breaks.
    pub fn with_point(&self, p: Point) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.push(p);
        Self::new(pts, self.delta, self.ambient_dim)
    }
}

/// First pair of points closer than `delta`, if any.
pub fn separation_violation(points: &[Point], delta: f64) -> Option<(usize, usize)> {
    let lim = delta * (1.0 - RADIUS_SLACK);
    let lim2 = lim * lim;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j][0] - points[i][0] >= lim {
                break;
            }
            if math::dist2(points[i], points[j]) < lim2 {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// A weighted point of `P(2δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Point,
    pub weight: f64,
}

/// Weighted atoms near the truncated parabola.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrostmanMeasure {
    atoms: Vec<Atom>,
    delta: f64,
    total_mass: f64,
}

impl FrostmanMeasure {
    /// Checks `t in [-1, 1]`, `|y - t^2| <= 2δ` and nonnegative finite weights.
    pub fn new(atoms: Vec<Atom>, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        for a in &atoms {
            let [t, y] = a.point;
            if !(t.is_finite() && y.is_finite() && a.weight.is_finite()) {
                return Err(param!("non-finite atom {a:?}"));
            }
            if a.weight < 0.0 {
                return Err(param!("negative weight {}", a.weight));
            }
            if !(-1.0..=1.0).contains(&t) {
                return Err(param!("atom at t = {t} outside [-1, 1]"));
            }
            if math::abs(y - t * t) > 2.0 * delta * (1.0 + RADIUS_SLACK) {
                return Err(param!("atom {:?} is not within 2*delta of the parabola", a.point));
            }
        }
        let total_mass = math::kahan_sum(atoms.iter().map(|a| a.weight));
        Ok(FrostmanMeasure { atoms, delta, total_mass })
    }

    pub fn empty(delta: f64) -> Result<Self> {
        Self::new(Vec::new(), delta)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> Vec<Point> {
        self.atoms.iter().map(|a| a.point).collect()
    }

    /// Sum of absolute weights, an upper bound for `|mu_hat|`.
    pub fn weight_l1(&self) -> f64 {
        math::kahan_sum(self.atoms.iter().map(|a| math::abs(a.weight)))
    }

    /// Largest `|x|` over the support.
    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(|a| math::norm(a.point)).fold(0.0, f64::max)
    }

    /// Restriction to the atoms with the given indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let atoms: Vec<Atom> = indices.iter().map(|&i| self.atoms[i]).collect();
        let total_mass = math::kahan_sum(atoms.iter().map(|a| a.weight));
        FrostmanMeasure { atoms, delta: self.delta, total_mass }
    }

    /// All weights multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { point: a.point, weight: a.weight * factor })
            .collect();
        Self::new(atoms, self.delta)
    }

    /// Same measure with one extra atom.
    pub fn with_atom(&self, atom: Atom) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.push(atom);
        Self::new(atoms, self.delta)
    }
}

/// How a covering number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    /// Exact left-to-right sweep (collinear horizontal data).
    Sweep,
    /// Greedy net: `|A|_r <= count <= |A|_{r/2}`.
    GreedyNet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Covering {
    pub count: usize,
    pub method: CoverMethod,
}

/// Number of closed `r`-balls needed to cover `points`.
///
/// Points sharing one `y` value are covered exactly by a sweep; anything else
/// gets a greedy net of point-centred balls.
pub fn covering_number(points: &[Point], r: f64) -> Result<Covering> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(param!("covering radius must be positive, got {r}"));
    }
    if points.is_empty() {
        return Ok(Covering { count: 0, method: CoverMethod::Sweep });
    }
    let y0 = points[0][1];
    if points.iter().all(|p| p[1] == y0) {
        let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
        return Ok(Covering { count: covering_number_1d(&xs, r), method: CoverMethod::Sweep });
    }
    Ok(Covering { count: greedy_net(points, r), method: CoverMethod::GreedyNet })
}

/// Exact `|A|_r` for `A` in the line: intervals of length `2r` placed
/// greedily from the left.
pub fn covering_number_1d(xs: &[f64], r: f64) -> usize {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let reach = 2.0 * r * (1.0 + RADIUS_SLACK);
    let mut count = 0;
    let mut start = f64::NEG_INFINITY;
    for x in sorted {
        if count == 0 || x - start > reach {
            count += 1;
            start = x;
        }
    }
    count
}

fn greedy_net(points: &[Point], r: f64) -> usize {
    let cell = |p: Point| (math::floor(p[0] / r) as i64, math::floor(p[1] / r) as i64);
    let mut buckets: Vec<((i64, i64), usize)> =
        points.iter().enumerate().map(|(i, &p)| (cell(p), i)).collect();
    buckets.sort_unstable();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1]))
    });
    let r2 = (r * (1.0 + RADIUS_SLACK)) * (r * (1.0 + RADIUS_SLACK));
    let mut covered = alloc::vec![false; points.len()];
    let mut count = 0;
    for &i in &order {
        if covered[i] {
            continue;
        }
        count += 1;
        let (cx, cy) = cell(points[i]);
        for kx in cx - 1..=cx + 1 {
            for ky in cy - 1..=cy + 1 {
                let lo = buckets.partition_point(|(k, _)| *k < (kx, ky));
                for &(k, j) in &buckets[lo..] {
                    if k != (kx, ky) {
                        break;
                    }
                    if !covered[j] && math::dist2(points[i], points[j]) <= r2 {
                        covered[j] = true;
                    }
                }
            }
        }
    }
    count
}

/// Smallest grid multiple `k >= 1` with `k * delta >= d` (up to round-off).
fn grid_radius_index(d: f64, delta: f64) -> u64 {
    let q = d / delta * (1.0 - RADIUS_SLACK);
    (math::ceil(q) as u64).max(1)
}

/// `max_{c, 1 <= k <= k_max} mass(B(c, k δ)) / denom(k)` with centres at the
/// items themselves. `dist` must be symmetric.
pub(crate) fn max_ball_ratio<D, W, Q>(n: usize, delta: f64, dist: D, weight: W, denom: Q) -> f64
where
    D: Fn(usize, usize) -> f64 + Sync + Send,
    W: Fn(usize) -> f64 + Sync + Send,
    Q: Fn(u64) -> f64 + Sync + Send,
{
    if n == 0 {
        return 0.0;
    }
    let diam = par::map(n, |c| (0..n).map(|j| dist(c, j)).fold(0.0, f64::max))
        .into_iter()
        .fold(0.0, f64::max);
    let k_max = (math::floor(diam / delta * (1.0 + RADIUS_SLACK)) as u64).max(1);
    par::map(n, |c| {
        let mut ks: Vec<(u64, usize)> = (0..n).map(|j| (grid_radius_index(dist(c, j), delta), j)).collect();
        ks.sort_unstable();
        let mut best: f64 = 0.0;
        let mut mass = math::KahanSum::default();
        for (pos, &(k, j)) in ks.iter().enumerate() {
            if k > k_max {
                break;
            }
            mass.add(weight(j));
            let group_ends = ks.get(pos + 1).is_none_or(|next| next.0 != k);
            if group_ends {
                best = best.max(mass.value() / denom(k));
            }
        }
        best
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// `max |P ∩ B(x, kδ)| / k^s` over `x in P` and `1 <= k <= diam/δ`.
///
/// Restricting centres to `P` and radii to the grid underestimates the
/// unrestricted constant by at most a factor `2^{s+1}`.
pub fn set_constant(points: &[Point], delta: f64, s: f64) -> f64 {
    max_ball_ratio(
        points.len(),
        delta,
        |i, j| math::dist(points[i], points[j]),
        |_| 1.0,
        |k| math::pow(k as f64, s),
    )
}

/// The (δ,s,C)-set constant of `set`; see [`set_constant`].
pub fn delta_set_constant(set: &DiscretizedSet, s: f64) -> Result<f64> {
    if !(0.0..=set.ambient_dim() as f64).contains(&s) {
        return Err(param!("exponent s = {s} outside [0, {}]", set.ambient_dim()));
    }
    if set.is_empty() {
        return Err(param!("empty set has no (delta, s) constant"));
    }
    Ok(set_constant(set.points(), set.delta(), s))
}

/// Empirical Frostman constant `max mu(B(x, kδ)) / (kδ)^s`, centres at atoms.
pub fn frostman_constant(mu: &FrostmanMeasure, s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(param!("exponent s = {s} must be nonnegative"));
    }
    let atoms = mu.atoms();
    let delta = mu.delta();
    Ok(max_ball_ratio(
        atoms.len(),
        delta,
        |i, j| math::dist(atoms[i].point, atoms[j].point),
        |j| atoms[j].weight,
        |k| math::pow(k as f64 * delta, s),
    ))
}

/// `{k δ^s : 0 <= k < floor(δ^{-s})}`, a (δ,s)-set in `[0, 1)`.
pub fn build_ap_set(s: f64, delta: f64) -> Result<DiscretizedSet> {
    if !(s > 0.0 && s < 1.0) {
        return Err(param!("exponent s = {s} outside (0, 1)"));
    }
    check_delta(delta)?;
    let step = math::pow(delta, s);
    let n = math::floor(math::pow(delta, -s) + 1e-9) as usize;
    let xs: Vec<f64> = (0..n).map(|k| k as f64 * step).filter(|&x| x <= 1.0).collect();
    DiscretizedSet::on_line(&xs, delta)
}

/// `{(t, t^2)}` over a set of reals in `[-1, 1]`; with `snap`, both
/// coordinates are rounded half-to-even to the δ-grid.
pub fn lift_to_parabola(a: &DiscretizedSet, snap: bool) -> Result<DiscretizedSet> {
    if a.ambient_dim() != 1 {
        return Err(param!("lift_to_parabola needs a one-dimensional set"));
    }
    let delta = a.delta();
    let mut pts = Vec::with_capacity(a.len());
    for p in a.points() {
        let t = p[0];
        if !(-1.0..=1.0).contains(&t) {
            return Err(param!("t = {t} outside [-1, 1]"));
        }
        let q = if snap {
            [math::rint(t / delta) * delta, math::rint(t * t / delta) * delta]
        } else {
            [t, t * t]
        };
        pts.push(q);
    }
    DiscretizedSet::new(pts, delta, 2)
}

/// Lift of `a` with equal weights `1/|a|`.
pub fn uniform_frostman(a: &DiscretizedSet, delta: f64) -> Result<FrostmanMeasure> {
    if a.is_empty() {
        return Err(param!("uniform_frostman needs a nonempty set"));
    }
    let w = 1.0 / a.len() as f64;
    let atoms = a
        .points()
        .iter()
        .map(|p| {
            let t = p[0];
            if !(-1.0..=1.0).contains(&t) {
                return Err(param!("t = {t} outside [-1, 1]"));
            }
            Ok(Atom { point: [t, t * t], weight: w })
        })
        .collect::<Result<Vec<_>>>()?;
    FrostmanMeasure::new(atoms, delta)
}

/// Arc masses below this go to the dust piece.
pub const DUST_MASS: f64 = 9.094_947_017_729_282e-13; // 2^-40

/// Atoms of the arcs whose mass lies in `(kappa, 2 kappa]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPiece {
    pub kappa: f64,
    /// `kappa = 2^{-level}`.
    pub level: i32,
    pub measure: FrostmanMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSplit {
    /// Ordered by decreasing `kappa`.
    pub pieces: Vec<LevelPiece>,
    /// Atoms of arcs lighter than [`DUST_MASS`].
    pub dust: FrostmanMeasure,
}

/// `j` with `2^{-j} < m <= 2^{-j+1}`.
fn dyadic_level(m: f64) -> i32 {
    let mut j = -(math::floor(libm::log2(m)) as i32);
    while m <= math::pow2(-j) {
        j += 1;
    }
    while m > math::pow2(1 - j) {
        j -= 1;
    }
    j
}

/// Groups the dyadic δ-arcs `[kδ, (k+1)δ)` (in `t`) by mass level.
pub fn level_split(mu: &FrostmanMeasure) -> LevelSplit {
    let delta = mu.delta();
    let mut arcs: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, a) in mu.atoms().iter().enumerate() {
        arcs.entry(math::floor(a.point[0] / delta) as i64).or_default().push(i);
    }
    let mut levels: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    let mut dust = Vec::new();
    for idx in arcs.into_values() {
        let m = math::kahan_sum(idx.iter().map(|&i| mu.atoms()[i].weight));
        if m < DUST_MASS {
            dust.extend(idx);
        } else {
            levels.entry(dyadic_level(m)).or_default().extend(idx);
        }
    }
    let pieces = levels
        .into_iter()
        .map(|(level, mut idx)| {
            idx.sort_unstable();
            LevelPiece { kappa: math::pow2(-level), level, measure: mu.subset(&idx) }
        })
        .collect();
    dust.sort_unstable();
    LevelSplit { pieces, dust: mu.subset(&dust) }
}

/// Half-open interval `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub start: f64,
    pub len: f64,
}

impl DyadicInterval {
    pub fn end(&self) -> f64 {
        self.start + self.len
    }

    pub fn contains(&self, x: f64) -> bool {
        self.start <= x && x < self.end()
    }

    pub fn dist(&self, other: &DyadicInterval) -> f64 {
        (other.start - self.end()).max(self.start - other.end()).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitneySquare {
    pub i_interval: DyadicInterval,
    pub j_interval: DyadicInterval,
    pub side: f64,
}

/// Dyadic squares `I x J` of `[-1,1)^2` with `side <= dist(I, J) < 4 side`,
/// down to side δ. They are disjoint and cover `|x - y| >= 2δ`.
pub fn whitney_decomposition(delta: f64) -> Result<Vec<WhitneySquare>> {
    let m = match math::exact_log2(delta) {
        Some(m) if (-30..=0).contains(&m) => -m,
        _ => return Err(param!("delta must be 2^-m with 0 <= m <= 30, got {delta}")),
    };
    let root: i64 = 1 << (m + 1);
    let to_interval = |start: i64, len: i64| DyadicInterval {
        start: -1.0 + start as f64 * delta,
        len: len as f64 * delta,
    };
    let mut out = Vec::new();
    let mut stack = alloc::vec![(0i64, 0i64, root)];
    while let Some((x0, y0, len)) = stack.pop() {
        let gap = ((x0 - y0).abs() - len).max(0);
        if gap >= len {
            out.push(WhitneySquare {
                i_interval: to_interval(x0, len),
                j_interval: to_interval(y0, len),
                side: len as f64 * delta,
            });
        } else if len > 1 {
            let h = len / 2;
            for (dx, dy) in [(h, h), (h, 0), (0, h), (0, 0)] {
                stack.push((x0 + dx, y0 + dy, h));
            }
        }
    }
    Ok(out)
}
