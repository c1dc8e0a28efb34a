//! Cayley and disc-to-Klein maps, the chord lines of x-axis circles, the
//! parametrisation `Φ`, the line metric on `A(2,1)` and sampled bilipschitz
//! certificates.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::Circle;
use crate::error::{domain, param, Error};
use crate::math;
use crate::rng::Stream;
use crate::{par, Point, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `C(z) = (z − i)/(z + i)`.
pub fn cayley(z: Complex64) -> Result<Complex64> {
    if z == -I {
        return Err(Error::Singular(alloc::string::String::from("Cayley transform at z = -i")));
    }
    Ok((z - I) / (z + I))
}

/// `F(z) = 2z/(1 + |z|^2)`.
pub fn disc_to_klein(z: Complex64) -> Complex64 {
    z * (2.0 / (1.0 + z.norm_sqr()))
}

/// `G = F ∘ C` on the closed upper half-plane.
pub fn g_transform(z: Complex64) -> Result<Complex64> {
    if !(z.im >= 0.0) {
        return Err(domain!("G is defined on Im z >= 0, got {z}"));
    }
    Ok(disc_to_klein(cayley(z)?))
}

fn c2p(z: Complex64) -> Point {
    [z.re, z.im]
}

/// An affine line in normal form: unit direction whose first nonzero
/// coordinate is positive, and the foot of the perpendicular from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    #[serde(rename = "dir")]
    pub direction: Point,
    pub offset: Point,
}

impl Line {
    /// Line through `p` with direction `dir` (any nonzero length).
    pub fn new(dir: Point, p: Point) -> Result<Self> {
        let len = math::norm(dir);
        if !(len > 0.0 && len.is_finite() && p[0].is_finite() && p[1].is_finite()) {
            return Err(param!("line needs a finite nonzero direction, got {dir:?} through {p:?}"));
        }
        let mut d = [dir[0] / len, dir[1] / len];
        if d[0] < 0.0 || (d[0] == 0.0 && d[1] < 0.0) {
            d = [-d[0], -d[1]];
        }
        let along = p[0] * d[0] + p[1] * d[1];
        Ok(Line { direction: d, offset: [p[0] - along * d[0], p[1] - along * d[1]] })
    }

    pub fn through(p: Point, q: Point) -> Result<Self> {
        Self::new([q[0] - p[0], q[1] - p[1]], p)
    }

    /// Unit normal `(-d_y, d_x)`.
    pub fn normal(&self) -> Point {
        [-self.direction[1], self.direction[0]]
    }

    pub fn distance(&self, p: Point) -> f64 {
        let n = self.normal();
        math::abs((p[0] - self.offset[0]) * n[0] + (p[1] - self.offset[1]) * n[1])
    }

    /// Intersection with the closed unit disc, as a segment.
    pub fn unit_disc_chord(&self) -> Option<(Point, Point)> {
        let a2 = self.offset[0] * self.offset[0] + self.offset[1] * self.offset[1];
        if a2 > 1.0 {
            return None;
        }
        let h = math::sqrt(1.0 - a2);
        let [dx, dy] = self.direction;
        let [ox, oy] = self.offset;
        Some(([ox - h * dx, oy - h * dy], [ox + h * dx, oy + h * dy]))
    }

    /// Image under a rigid motion `p ↦ R p + shift`, `R` the rotation by `angle`.
    pub fn moved(&self, angle: f64, shift: Point) -> Line {
        let rot = rotate(angle);
        Line::new(rot(self.direction), add(rot(self.offset), shift)).expect("rotation keeps lines valid")
    }
}

pub(crate) fn rotate(angle: f64) -> impl Fn(Point) -> Point {
    let (s, c) = libm::sincos(angle);
    move |p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

/// Chord of the unit circle carrying `G` of an x-axis circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub start: Point,
    pub end: Point,
    pub line: Line,
}

/// Endpoints `C(ξ1)`, `C(ξ2)` and the line through them.
pub fn circle_to_chord(c: &Circle) -> Result<Chord> {
    if !(c.radius > 0.0) {
        return Err(Error::Degenerate(alloc::format!("circle of radius {} has no chord", c.radius)));
    }
    let start = c2p(cayley(Complex64::new(c.xi1, 0.0))?);
    let end = c2p(cayley(Complex64::new(c.xi2, 0.0))?);
    Ok(Chord { start, end, line: chord_line(c.xi1, c.xi2)? })
}

/// `ℓ(ξ1, ξ2)`, the line through `C(ξ1)` and `C(ξ2)` (`ξ1 ≠ ξ2`).
pub fn chord_line(xi1: f64, xi2: f64) -> Result<Line> {
    if xi1 == xi2 {
        return Err(Error::Degenerate(alloc::format!("coincident chord endpoints at {xi1}")));
    }
    let p = c2p(cayley(Complex64::new(xi1, 0.0))?);
    let q = c2p(cayley(Complex64::new(xi2, 0.0))?);
    Line::through(p, q)
}

/// Default floor `θ` of the domain `Ω_θ`.
pub const DEFAULT_THETA: f64 = 0.25;

/// `Φ(σ) = (2σ1 − √(6σ2 − 2σ1^2), 2σ1 + √(6σ2 − 2σ1^2))` on
/// `Ω_θ = {|σ| <= 10, 6σ2 − 2σ1^2 >= θ^2}`.
pub fn phi_map(sigma: Point, theta: f64) -> Result<Point> {
    let disc = 6.0 * sigma[1] - 2.0 * sigma[0] * sigma[0];
    if !(disc >= theta * theta) {
        return Err(domain!("6 s2 - 2 s1^2 = {disc} below theta^2 = {} at {sigma:?}", theta * theta));
    }
    if math::norm(sigma) > 10.0 {
        return Err(domain!("|sigma| > 10 at {sigma:?}"));
    }
    let r = math::sqrt(disc);
    let c = 2.0 * sigma[0];
    Ok([c - r, c + r])
}

/// `‖π1 − π2‖ + |a1 − a2|` with `π_j` the orthogonal projection onto the
/// direction of `ℓ_j` and `a_j` its offset.
pub fn line_metric(l1: &Line, l2: &Line) -> f64 {
    let [u0, u1] = l1.direction;
    let [v0, v1] = l2.direction;
    // The projection difference is symmetric and traceless, so its operator
    // norm is the length of its first column.
    let d11 = u0 * u0 - v0 * v0;
    let d12 = u0 * u1 - v0 * v1;
    let proj = math::sqrt(d11 * d11 + d12 * d12);
    proj + math::dist(l1.offset, l2.offset)
}

/// Smallest `c` with `ℓ1 ∩ B(1) ⊂ ℓ2(c r)`, where `r = d(ℓ1, ℓ2)`.
/// Zero when `r = 0` or `ℓ1` misses the unit disc.
pub fn nbhd_inclusion_check(l1: &Line, l2: &Line) -> f64 {
    let r = line_metric(l1, l2);
    if r == 0.0 {
        return 0.0;
    }
    match l1.unit_disc_chord() {
        // distance to ℓ2 is |affine| along ℓ1, so the sup sits at an endpoint
        Some((p, q)) => l2.distance(p).max(l2.distance(q)) / r,
        None => 0.0,
    }
}

/// Map under test in [`bilipschitz_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapId {
    Identity,
    Phi { theta: f64 },
    /// `(ξ1, ξ2) ↦ ℓ(ξ1, ξ2)`, target distance [`line_metric`].
    ChordLine,
    /// `(x, y) ↦ G(x + iy)`.
    GTransform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub seed: u64,
    pub n_samples: usize,
    /// Pairs that produced a finite ratio.
    pub valid_pairs: usize,
    pub lower: f64,
    pub upper: f64,
}

impl Certificate {
    pub fn distortion(&self) -> f64 {
        self.upper / self.lower
    }
}

enum Image {
    Point(Point),
    Line(Line),
}

fn apply(map: MapId, u: Point) -> Option<Image> {
    match map {
        MapId::Identity => Some(Image::Point(u)),
        MapId::Phi { theta } => phi_map(u, theta).ok().map(Image::Point),
        MapId::ChordLine => chord_line(u[0], u[1]).ok().map(Image::Line),
        MapId::GTransform => g_transform(Complex64::new(u[0], u[1])).ok().map(|z| Image::Point(c2p(z))),
    }
}

fn image_distance(a: &Image, b: &Image) -> f64 {
    match (a, b) {
        (Image::Point(p), Image::Point(q)) => math::dist(*p, *q),
        (Image::Line(p), Image::Line(q)) => line_metric(p, q),
        _ => f64::NAN,
    }
}

const CERT_CHUNK: usize = 1024;

/// Sampled lower and upper Lipschitz ratios of `map` over `n_samples` pairs
/// drawn from `sampler`. Each chunk of pairs uses its own labelled stream, so
/// the result does not depend on the thread count.
pub fn bilipschitz_certificate<S>(map: MapId, sampler: S, n_samples: usize, seed: u64) -> Result<Certificate>
where
    S: Fn(&mut Stream) -> Option<Point> + Sync + Send,
{
    let chunks = n_samples.div_ceil(CERT_CHUNK);
    let parts: Vec<(usize, f64, f64)> = par::map(chunks, |c| {
        let mut rng = Stream::indexed(seed, "bilipschitz", c as u64);
        let count = CERT_CHUNK.min(n_samples - c * CERT_CHUNK);
        let (mut valid, mut lo, mut hi) = (0usize, f64::INFINITY, 0.0f64);
        for _ in 0..count {
            let (Some(u), Some(v)) = (sampler(&mut rng), sampler(&mut rng)) else { continue };
            let d = math::dist(u, v);
            if d == 0.0 {
                continue;
            }
            let (Some(fu), Some(fv)) = (apply(map, u), apply(map, v)) else { continue };
            let ratio = image_distance(&fu, &fv) / d;
            if ratio.is_finite() {
                valid += 1;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        (valid, lo, hi)
    });
    let valid: usize = parts.iter().map(|p| p.0).sum();
    if valid == 0 {
        return Err(param!("no valid sample pairs out of {n_samples}"));
    }
    let lower = parts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let upper = parts.iter().map(|p| p.2).fold(0.0, f64::max);
    Ok(Certificate { seed, n_samples, valid_pairs: valid, lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(cayley(I).unwrap(), Complex64::new(0.0, 0.0));
        assert!(close(cayley(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(-1.0, 0.0)));
        assert!(close(cayley(Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(0.0, -1.0)));
        assert!(matches!(cayley(-I), Err(Error::Singular(_))));
    }

    #[test]
    fn klein_examples() {
        assert_eq!(disc_to_klein(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        assert_eq!(disc_to_klein(I), I);
        assert!(close(disc_to_klein(Complex64::new(0.5, 0.0)), Complex64::new(0.8, 0.0)));
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_transform(I).unwrap(), Complex64::new(0.0, 0.0));
        let z = g_transform(Complex64::new(0.5, 0.5)).unwrap();
        assert!(close(z, Complex64::new(-1.0 / 3.0, -2.0 / 3.0)), "{z}");
        assert!(g_transform(Complex64::new(0.0, -0.1)).is_err());
    }

    #[test]
    fn chord_example() {
        let c = Circle::new(0.5, 0.5).unwrap();
        let chord = circle_to_chord(&c).unwrap();
        assert!(math::dist(chord.start, [-1.0, 0.0]) < 1e-15);
        assert!(math::dist(chord.end, [0.0, -1.0]) < 1e-15);
        // x + y = -1
        assert!(chord.line.distance([-0.5, -0.5]) < 1e-15);
        assert!(chord.line.distance([-1.0 / 3.0, -2.0 / 3.0]) < 1e-15);
        assert!(circle_to_chord(&Circle::new(0.5, 0.0).unwrap()).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_map([0.0, 1.0 / 6.0], 0.5).unwrap(), [-1.0, 1.0]);
        assert_eq!(phi_map([1.0, 1.0], 0.5).unwrap(), [0.0, 4.0]);
        assert_eq!(phi_map([1.5, 0.75], 0.0).unwrap(), [3.0, 3.0]);
        assert!(phi_map([1.0, 0.3], 0.5).is_err());
    }

    #[test]
    fn metric_examples() {
        let x_axis = Line::new([1.0, 0.0], [0.0, 0.0]).unwrap();
        let y_axis = Line::new([0.0, -3.0], [0.0, 5.0]).unwrap();
        let raised = Line::new([-2.0, 0.0], [4.0, 1.0]).unwrap();
        assert_eq!(y_axis.direction, [0.0, 1.0]);
        assert_eq!(y_axis.offset, [0.0, 0.0]);
        assert_eq!(line_metric(&x_axis, &x_axis), 0.0);
        assert_eq!(line_metric(&x_axis, &y_axis), 1.0);
        assert_eq!(line_metric(&x_axis, &raised), 1.0);
    }

    #[test]
    fn inclusion_examples() {
        let x_axis = Line::new([1.0, 0.0], [0.0, 0.0]).unwrap();
        let shifted = Line::new([1.0, 0.0], [0.0, 0.3]).unwrap();
        assert!((nbhd_inclusion_check(&x_axis, &shifted) - 1.0).abs() < 1e-15);
        let alpha: f64 = 0.4;
        let rotated = Line::new([libm::cos(alpha), libm::sin(alpha)], [0.0, 0.0]).unwrap();
        assert!((nbhd_inclusion_check(&x_axis, &rotated) - 1.0).abs() < 1e-14);
        assert_eq!(nbhd_inclusion_check(&x_axis, &x_axis), 0.0);
    }

    #[test]
    fn identity_certificate() {
        let cert = bilipschitz_certificate(MapId::Identity, |r| Some([r.uniform(), r.uniform()]), 2000, 3).unwrap();
        assert!((cert.lower - 1.0).abs() < 1e-12 && (cert.upper - 1.0).abs() < 1e-12);
        assert!(bilipschitz_certificate(MapId::Identity, |_| None, 100, 3).is_err());
    }
}
