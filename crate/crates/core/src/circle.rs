//! Triple sums of parabola points and the x-axis circles they lie on.
//!
//! For `x_i = (ξ_i, ξ_i^2)` with sum `(a, b)`, the point
//! `A(ξ1, ξ2) = (3(ξ1+ξ2), √3(ξ1-ξ2))` lies on the circle centred at `(2a, 0)`
//! with squared radius `6b - 2a^2`, which is never negative.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::discretized::{covering_number, DiscretizedSet};
use crate::error::{domain, param, resource};
use crate::math::{self, RADIUS_SLACK};
use crate::{par, Point, Result};

/// Width constant `C` in the annulus `S(Cδ/r)` and the ball `B(C√δ)`.
pub const ANNULUS_C: f64 = 8.0;

/// Per-circle lists collect `A(π x1, π x2)` whenever some `x3` completes a
/// triple with `|x1 + x2 + x3 - σ| <= TRIPLE_TOLERANCE * δ`.
pub const TRIPLE_TOLERANCE: f64 = 6.0;

/// Largest number of triple sums enumerated by [`build_source_config`].
pub const TRIPLE_GUARD: usize = 20_000_000;

const DISCRIMINANT_FLOOR: f64 = -1e-12;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// The circle `∂B((center_x, 0), radius)` and its x-axis crossings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    #[serde(rename = "cx")]
    pub center_x: f64,
    #[serde(rename = "r")]
    pub radius: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl Circle {
    pub fn new(center_x: f64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite() && center_x.is_finite()) {
            return Err(param!("circle needs finite centre and radius >= 0, got ({center_x}, {radius})"));
        }
        Ok(Circle { center_x, radius, xi1: center_x - radius, xi2: center_x + radius })
    }

    pub fn center(&self) -> Point {
        [self.center_x, 0.0]
    }

    /// Point at angle `phi` measured from the positive x-direction.
    pub fn point_at(&self, phi: f64) -> Point {
        [self.center_x + self.radius * math::cos(phi), self.radius * math::sin(phi)]
    }
}

/// `A(ξ1, ξ2) = (3(ξ1 + ξ2), √3(ξ1 − ξ2))`.
pub fn a_map(xi1: f64, xi2: f64) -> Point {
    [3.0 * (xi1 + xi2), SQRT_3 * (xi1 - xi2)]
}

/// `(a, b) = Σ (ξ_i, ξ_i^2)`.
pub fn triple_sum(xi1: f64, xi2: f64, xi3: f64) -> (f64, f64) {
    (xi1 + xi2 + xi3, xi1 * xi1 + xi2 * xi2 + xi3 * xi3)
}

/// The circle `S_{a,b} = ∂B((2a, 0), √(6b − 2a^2))`. Discriminants in
/// `[-1e-12, 0)` are treated as round-off and clamped.
pub fn triple_sum_circle(a: f64, b: f64) -> Result<Circle> {
    let disc = 6.0 * b - 2.0 * a * a;
    if !(disc >= DISCRIMINANT_FLOOR) {
        return Err(domain!("6b - 2a^2 = {disc} < 0 for (a, b) = ({a}, {b}); not a parabola triple sum"));
    }
    Circle::new(2.0 * a, math::sqrt(disc.max(0.0)))
}

/// `| |A(ξ1, ξ2) − (2a, 0)|^2 − (6b − 2a^2) |`; zero in exact arithmetic.
pub fn verify_circle_identity(xi1: f64, xi2: f64, xi3: f64) -> f64 {
    let (a, b) = triple_sum(xi1, xi2, xi3);
    let p = a_map(xi1, xi2);
    let lhs = math::dist2(p, [2.0 * a, 0.0]);
    math::abs(lhs - (6.0 * b - 2.0 * a * a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusClass {
    OnAnnulus,
    InCenterBall,
    Outside,
}

/// Result of [`annulus_membership`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub class: AnnulusClass,
    /// Annulus half-width `Cδ/r`, or ball radius `C√δ` for small circles.
    pub tolerance: f64,
    /// Measured `|dist(p, centre) − r|`, or `dist(p, centre)` for small circles.
    pub slack: f64,
}

/// Classifies `p` against the circle with the constant [`ANNULUS_C`].
///
/// Circles with `r^2 <= δ` are replaced by the ball `B(centre, C√δ)`; larger
/// ones by the annulus of half-width `Cδ/r`.
pub fn annulus_membership(p: Point, c: &Circle, delta: f64) -> Membership {
    let d = math::dist(p, c.center());
    if c.radius * c.radius <= delta {
        let tolerance = ANNULUS_C * math::sqrt(delta);
        let class = if d <= tolerance { AnnulusClass::InCenterBall } else { AnnulusClass::Outside };
        Membership { class, tolerance, slack: d }
    } else {
        let tolerance = ANNULUS_C * delta / c.radius;
        let slack = math::abs(d - c.radius);
        let class = if slack <= tolerance { AnnulusClass::OnAnnulus } else { AnnulusClass::Outside };
        Membership { class, tolerance, slack }
    }
}

/// Pairs, circles, the point set `F` and the per-circle lists built from a
/// parabola set `P` and an anchor `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FurstenbergSourceConfig {
    pub delta: f64,
    #[serde(rename = "P")]
    pub points: Vec<Point>,
    #[serde(rename = "Y")]
    pub anchor: Point,
    /// Ordered index pairs `(y1, y2)` into `P`, lexicographic.
    pub pairs: Vec<[u32; 2]>,
    /// `σ = y1 + y2 + Y` per pair.
    pub sigma: Vec<Point>,
    pub circles: Vec<Circle>,
    /// `A(π x, π y)` for ordered `(x, y)`; index `i * |P| + j`.
    #[serde(rename = "F")]
    pub f_points: Vec<Point>,
    /// Per pair: sorted indices into `F`.
    pub lists: Vec<Vec<u32>>,
    /// Triple-sum tolerance used for the lists (`TRIPLE_TOLERANCE * δ`).
    pub tolerance: f64,
    /// `|F|_δ`.
    pub f_covering: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCounts {
    pub on_annulus: usize,
    pub in_center_ball: usize,
    pub outside: usize,
}

impl FurstenbergSourceConfig {
    /// Classifies every list point against its circle at the list tolerance.
    pub fn membership_counts(&self) -> MembershipCounts {
        let mut counts = MembershipCounts::default();
        for (circle, list) in self.circles.iter().zip(&self.lists) {
            for &i in list {
                match annulus_membership(self.f_points[i as usize], circle, self.tolerance).class {
                    AnnulusClass::OnAnnulus => counts.on_annulus += 1,
                    AnnulusClass::InCenterBall => counts.in_center_ball += 1,
                    AnnulusClass::Outside => counts.outside += 1,
                }
            }
        }
        counts
    }
}

/// Builds circles and `F` from `P ⊂ P(2δ)` and the anchor `Y ∈ P`.
pub fn build_source_config(p: &DiscretizedSet, y: Point, pair_limit: usize) -> Result<FurstenbergSourceConfig> {
    let delta = p.delta();
    if p.ambient_dim() != 2 || p.is_empty() {
        return Err(param!("build_source_config needs a nonempty planar set"));
    }
    for q in p.points() {
        if !(-1.0..=1.0).contains(&q[0]) || math::abs(q[1] - q[0] * q[0]) > 2.0 * delta * (1.0 + RADIUS_SLACK) {
            return Err(param!("point {q:?} is not on the delta-neighbourhood of the parabola"));
        }
    }
    let anchor_index = p.index_of(y).ok_or_else(|| param!("anchor {y:?} is not a point of P"))?;
    let pts = p.points();
    let n = pts.len();
    if n.saturating_pow(3) > TRIPLE_GUARD {
        return Err(resource!("|P|^3 = {} triple sums exceed the guard {TRIPLE_GUARD}", n.saturating_pow(3)));
    }
    let anchor = pts[anchor_index];

    let pairs: Vec<[u32; 2]> = (0..n)
        .flat_map(|i| (0..n).map(move |j| [i as u32, j as u32]))
        .take(pair_limit)
        .collect();
    let sigma: Vec<Point> = pairs
        .iter()
        .map(|&[i, j]| {
            let (a, b) = (pts[i as usize], pts[j as usize]);
            [a[0] + b[0] + anchor[0], a[1] + b[1] + anchor[1]]
        })
        .collect();
    let circles = sigma.iter().map(|s| triple_sum_circle(s[0], s[1])).collect::<Result<Vec<_>>>()?;
    let f_points: Vec<Point> = (0..n)
        .flat_map(|i| (0..n).map(move |j| a_map(pts[i][0], pts[j][0])))
        .collect();

    let tolerance = TRIPLE_TOLERANCE * delta;
    let triples = TripleIndex::new(pts, tolerance);
    let lists = par::map(sigma.len(), |k| triples.pairs_near(sigma[k], n));

    let f_covering = covering_number(&f_points, delta)?.count;
    Ok(FurstenbergSourceConfig {
        delta,
        points: pts.to_vec(),
        anchor,
        pairs,
        sigma,
        circles,
        f_points,
        lists,
        tolerance,
        f_covering,
    })
}

/// Triple sums bucketed on a grid of side `tol`.
struct TripleIndex {
    tol: f64,
    entries: Vec<((i64, i64), Point, u32, u32)>,
}

impl TripleIndex {
    fn new(pts: &[Point], tol: f64) -> Self {
        let n = pts.len();
        let mut entries = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = [pts[i][0] + pts[j][0] + pts[k][0], pts[i][1] + pts[j][1] + pts[k][1]];
                    entries.push((Self::cell(s, tol), s, i as u32, j as u32));
                }
            }
        }
        entries.sort_by_key(|a| a.0);
        TripleIndex { tol, entries }
    }

    fn cell(s: Point, tol: f64) -> (i64, i64) {
        (math::floor(s[0] / tol) as i64, math::floor(s[1] / tol) as i64)
    }

    /// Sorted, deduplicated `i * n + j` over triples `(i, j, ·)` near `sigma`.
    fn pairs_near(&self, sigma: Point, n: usize) -> Vec<u32> {
        let (cx, cy) = Self::cell(sigma, self.tol);
        let tol2 = self.tol * self.tol;
        let mut out = Vec::new();
        for kx in cx - 1..=cx + 1 {
            for ky in cy - 1..=cy + 1 {
                let lo = self.entries.partition_point(|e| e.0 < (kx, ky));
                for e in self.entries[lo..].iter().take_while(|e| e.0 == (kx, ky)) {
                    if math::dist2(e.1, sigma) <= tol2 {
                        out.push(e.2 * n as u32 + e.3);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretized::{build_ap_set, lift_to_parabola};

    #[test]
    fn a_map_examples() {
        assert_eq!(a_map(0.0, 0.0), [0.0, 0.0]);
        assert_eq!(a_map(1.0, 0.0), [3.0, SQRT_3]);
        assert_eq!(a_map(1.0, -1.0), [0.0, 2.0 * SQRT_3]);
    }

    #[test]
    fn circle_examples() {
        let c = triple_sum_circle(0.0, 0.0).unwrap();
        assert_eq!((c.center_x, c.radius), (0.0, 0.0));
        let c = triple_sum_circle(1.0, 1.0).unwrap();
        assert_eq!((c.center_x, c.radius, c.xi1, c.xi2), (2.0, 2.0, 0.0, 4.0));
        let c = triple_sum_circle(0.0, 2.0).unwrap();
        assert!((c.radius - libm::sqrt(12.0)).abs() < 1e-15);
        assert!(triple_sum_circle(1.0, 0.0).is_err());
        assert_eq!(triple_sum_circle(1.0, 1.0 / 3.0 - 1e-14).unwrap().radius, 0.0);
    }

    #[test]
    fn identity_examples() {
        assert_eq!(verify_circle_identity(0.0, 0.0, 0.0), 0.0);
        assert!(verify_circle_identity(1.0, 0.0, 0.0) < 1e-15);
        assert!(verify_circle_identity(1.0, -1.0, 0.0) < 1e-14);
    }

    #[test]
    fn membership_examples() {
        let c = Circle::new(1.0, 2.0).unwrap();
        let m = annulus_membership(c.point_at(0.0), &c, 1e-3);
        assert_eq!((m.class, m.slack), (AnnulusClass::OnAnnulus, 0.0));

        let delta = 1e-4;
        let (x1, x2, x3) = (0.5, -0.2, 0.3);
        let (a, b) = triple_sum(x1, x2, x3);
        let perturbed = triple_sum_circle(a, b + delta).unwrap();
        assert_eq!(annulus_membership(a_map(x1, x2), &perturbed, delta).class, AnnulusClass::OnAnnulus);

        let point = Circle::new(0.0, 0.0).unwrap();
        let m = annulus_membership([2.0 * libm::sqrt(delta), 0.0], &point, delta);
        assert_eq!(m.class, AnnulusClass::InCenterBall);
        let m = annulus_membership([9.0 * libm::sqrt(delta), 0.0], &point, delta);
        assert_eq!(m.class, AnnulusClass::Outside);
    }

    #[test]
    fn source_config_small() {
        let one = lift_to_parabola(&DiscretizedSet::on_line(&[0.5], 0.1).unwrap(), false).unwrap();
        let cfg = build_source_config(&one, [0.5, 0.25], 100).unwrap();
        assert_eq!((cfg.pairs.len(), cfg.circles.len(), cfg.f_points.len()), (1, 1, 1));

        let three = lift_to_parabola(&DiscretizedSet::on_line(&[0.0, 0.5, 1.0], 0.1).unwrap(), false).unwrap();
        let cfg = build_source_config(&three, [0.0, 0.0], 100).unwrap();
        let k = cfg.pairs.iter().position(|&p| p == [1, 2]).unwrap();
        assert_eq!(cfg.sigma[k], [1.5, 1.25]);
        assert_eq!(cfg.circles[k].center_x, 3.0);
        assert!((cfg.circles[k].radius - libm::sqrt(3.0)).abs() < 1e-15);
        assert!(build_source_config(&three, [0.3, 0.09], 100).is_err());
        assert_eq!(build_source_config(&three, [0.0, 0.0], 4).unwrap().pairs.len(), 4);
    }

    #[test]
    fn ap_lists_stay_near_circles() {
        let delta = 1.0 / 1024.0;
        let p = lift_to_parabola(&build_ap_set(0.5, delta).unwrap(), false).unwrap();
        let cfg = build_source_config(&p, p.points()[0], usize::MAX).unwrap();
        let counts = cfg.membership_counts();
        assert_eq!(counts.outside, 0);
        assert!(counts.on_annulus > 0);
        // every list contains the exact triple (y1, y2, Y) itself
        for (k, &[i, j]) in cfg.pairs.iter().enumerate() {
            assert!(cfg.lists[k].binary_search(&(i * 32 + j)).is_ok());
        }
    }
}
