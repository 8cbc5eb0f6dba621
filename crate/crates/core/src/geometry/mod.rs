//! Comparator geometries.
//!
//! Every geometry supplies a notion of "x is at least as close to `a` as to
//! `b`" (the region `R_ab`), geodesic segments between points, and a way to
//! locate where a segment crosses the bisector `H_ab`. Five instances are
//! provided: Euclidean space, power (weighted) distance on Euclidean space,
//! the Poincaré ball model of hyperbolic space, the open hemisphere and the
//! full sphere. The full sphere is not convex (antipodal points have no
//! unique geodesic) and is flagged as such.

mod axioms;
mod stereo;

pub use axioms::{check_axioms, AxiomOutcome, AxiomReport, AxiomViolation};
pub use stereo::{stereographic_ball_image, stereographic_project, Stereographic};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance used when validating unit-norm points on spheres.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Euclidean,
    Weighted,
    HyperbolicBall,
    Hemisphere,
    Sphere,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 5] = [
        GeometryKind::Euclidean,
        GeometryKind::Weighted,
        GeometryKind::HyperbolicBall,
        GeometryKind::Hemisphere,
        GeometryKind::Sphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::Weighted => "weighted",
            GeometryKind::HyperbolicBall => "hyperbolic_ball",
            GeometryKind::Hemisphere => "hemisphere",
            GeometryKind::Sphere => "sphere",
        }
    }

    /// Linear comparators: `R_ab` is a half-space in the coordinates.
    pub fn is_linear(self) -> bool {
        matches!(self, GeometryKind::Euclidean | GeometryKind::Weighted)
    }

    pub fn is_spherical(self) -> bool {
        matches!(self, GeometryKind::Hemisphere | GeometryKind::Sphere)
    }

    /// All kinds except the full sphere satisfy the convexity axioms.
    pub fn is_convex(self) -> bool {
        self != GeometryKind::Sphere
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "euclidean" => Ok(GeometryKind::Euclidean),
            "weighted" | "power" => Ok(GeometryKind::Weighted),
            "hyperbolic" | "hyperbolic_ball" | "poincare" => Ok(GeometryKind::HyperbolicBall),
            "hemisphere" => Ok(GeometryKind::Hemisphere),
            "sphere" => Ok(GeometryKind::Sphere),
            other => Err(Error::InvalidParameter(format!("unknown geometry `{other}`"))),
        }
    }
}

/// A site or candidate witness. `weight` is only read by the weighted
/// geometry (units of squared length) and is zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
    #[serde(default)]
    pub weight: f64,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords, weight: 0.0 }
    }

    pub fn weighted(coords: Vec<f64>, weight: f64) -> Self {
        Point { coords, weight }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(coords: [f64; N]) -> Self {
        Point::new(coords.to_vec())
    }
}

/// Closed ball `{x : d(center, x) <= radius}` in the geometry's own metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricBall {
    pub center: Point,
    pub radius: f64,
}

impl MetricBall {
    pub fn new(center: Point, radius: f64) -> Self {
        MetricBall { center, radius }
    }

    pub fn contains(&self, g: &Geometry, x: &Point) -> bool {
        g.dist(&self.center, x) <= self.radius + g.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    /// Intrinsic dimension `n` (sphere points live in `R^{n+1}`).
    pub dim: usize,
    /// Margin tolerance for region membership and bisector tests.
    pub tolerance: f64,
    /// Stopping width on the geodesic parameter during bisection.
    pub bisection_tolerance: f64,
    /// Tolerance used when certifying constructed witnesses.
    pub certify_tolerance: f64,
}

const MAX_BISECTION_STEPS: usize = 200;

impl Geometry {
    pub fn new(kind: GeometryKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Geometry {
            kind,
            dim,
            tolerance: 1e-10,
            bisection_tolerance: 1e-12,
            certify_tolerance: 1e-8,
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(GeometryKind::Euclidean, dim).expect("dim >= 1")
    }

    pub fn weighted(dim: usize) -> Self {
        Self::new(GeometryKind::Weighted, dim).expect("dim >= 1")
    }

    pub fn hyperbolic_ball(dim: usize) -> Self {
        Self::new(GeometryKind::HyperbolicBall, dim).expect("dim >= 1")
    }

    pub fn hemisphere(dim: usize) -> Self {
        Self::new(GeometryKind::Hemisphere, dim).expect("dim >= 1")
    }

    pub fn sphere(dim: usize) -> Self {
        Self::new(GeometryKind::Sphere, dim).expect("dim >= 1")
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_bisection_tolerance(mut self, tolerance: f64) -> Self {
        self.bisection_tolerance = tolerance;
        self
    }

    pub fn with_certify_tolerance(mut self, tolerance: f64) -> Self {
        self.certify_tolerance = tolerance;
        self
    }

    /// Number of coordinates of a point.
    pub fn ambient_dim(&self) -> usize {
        if self.kind.is_spherical() {
            self.dim + 1
        } else {
            self.dim
        }
    }

    /// Validates and wraps coordinates.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        let p = Point::new(coords);
        self.validate(&p)?;
        Ok(p)
    }

    pub fn weighted_point(&self, coords: Vec<f64>, weight: f64) -> Result<Point> {
        let p = Point::weighted(coords, weight);
        self.validate(&p)?;
        Ok(p)
    }

    pub fn validate(&self, p: &Point) -> Result<()> {
        let expected = self.ambient_dim();
        if p.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: p.dim(),
            });
        }
        let invalid = |reason: String| Error::InvalidPoint {
            geometry: self.kind.name(),
            reason,
        };
        if p.coords.iter().any(|c| !c.is_finite()) || !p.weight.is_finite() {
            return Err(invalid("non-finite coordinate".into()));
        }
        match self.kind {
            GeometryKind::Euclidean | GeometryKind::Weighted => Ok(()),
            GeometryKind::HyperbolicBall => {
                let r = linalg::norm(&p.coords);
                if r < 1.0 {
                    Ok(())
                } else {
                    Err(invalid(format!("norm {r} is not inside the unit ball")))
                }
            }
            GeometryKind::Hemisphere | GeometryKind::Sphere => {
                let r = linalg::norm(&p.coords);
                if (r - 1.0).abs() > UNIT_NORM_TOLERANCE {
                    return Err(invalid(format!("norm {r} is not 1")));
                }
                if self.kind == GeometryKind::Hemisphere && p.coords[0] <= 0.0 {
                    return Err(invalid("first coordinate must be positive".into()));
                }
                Ok(())
            }
        }
    }

    pub fn validate_all(&self, points: &[Point]) -> Result<()> {
        points.iter().try_for_each(|p| self.validate(p))
    }

    fn check_dims(&self, pts: &[&Point]) -> Result<()> {
        let expected = self.ambient_dim();
        for p in pts {
            if p.dim() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: p.dim(),
                });
            }
        }
        Ok(())
    }

    /// Intrinsic distance. For the weighted geometry this is the underlying
    /// Euclidean distance; weights only enter the comparator.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_dims(&[x, y])?;
        Ok(self.dist(x, y))
    }

    pub(crate) fn dist(&self, x: &Point, y: &Point) -> f64 {
        match self.kind {
            GeometryKind::Euclidean | GeometryKind::Weighted => linalg::dist(&x.coords, &y.coords),
            GeometryKind::HyperbolicBall => poincare_distance(&x.coords, &y.coords),
            GeometryKind::Hemisphere | GeometryKind::Sphere => sphere_distance(&x.coords, &y.coords),
        }
    }

    /// Comparator slack: `d(x,b) - d(x,a)` for metric geometries and
    /// `(|x-b|^2 + w_b) - (|x-a|^2 + w_a)` for the weighted one. `x` lies in
    /// `R_ab` iff the slack is `>= -tolerance`.
    pub fn closer_margin(&self, x: &Point, a: &Point, b: &Point) -> Result<f64> {
        self.check_dims(&[x, a, b])?;
        Ok(self.margin(x, a, b))
    }

    pub(crate) fn margin(&self, x: &Point, a: &Point, b: &Point) -> f64 {
        match self.kind {
            GeometryKind::Weighted => power_margin(x, a, b) + b.weight - a.weight,
            _ => self.dist(x, b) - self.dist(x, a),
        }
    }

    pub fn in_region(&self, x: &Point, a: &Point, b: &Point) -> bool {
        self.margin(x, a, b) >= -self.tolerance
    }

    pub fn on_bisector(&self, x: &Point, a: &Point, b: &Point) -> bool {
        self.margin(x, a, b).abs() <= self.tolerance
    }

    /// Whether `x` and `y` are antipodal within tolerance (sphere only).
    pub fn antipodal(&self, x: &Point, y: &Point) -> bool {
        self.kind == GeometryKind::Sphere
            && std::f64::consts::PI - self.dist(x, y) <= self.tolerance
    }

    /// Point at arc-length fraction `t` along the geodesic from `x` to `y`.
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check_dims(&[x, y])?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::PreconditionViolated(format!(
                "geodesic parameter {t} outside [0, 1]"
            )));
        }
        if self.antipodal(x, y) {
            return Err(Error::AntipodalPair);
        }
        Ok(self.geodesic(x, y, t))
    }

    pub(crate) fn geodesic(&self, x: &Point, y: &Point, t: f64) -> Point {
        if t == 0.0 {
            return x.clone();
        }
        if t == 1.0 {
            return y.clone();
        }
        let coords = match self.kind {
            GeometryKind::Euclidean | GeometryKind::Weighted => linalg::lerp(&x.coords, &y.coords, t),
            GeometryKind::HyperbolicBall => poincare_geodesic(&x.coords, &y.coords, t),
            GeometryKind::Hemisphere | GeometryKind::Sphere => slerp(&x.coords, &y.coords, t),
        };
        let weight = (1.0 - t) * x.weight + t * y.weight;
        Point { coords, weight }
    }

    /// Finds a point on the geodesic `[x, y]` lying on the bisector `H_ab`,
    /// where `x` is on `a`'s side and `y` on `b`'s side.
    pub fn bisector_crossing(&self, x: &Point, y: &Point, a: &Point, b: &Point) -> Result<Point> {
        self.check_dims(&[x, y, a, b])?;
        self.crossing_with_slack(x, y, a, b, self.tolerance)
    }

    /// Same as [`Geometry::bisector_crossing`] with the side precondition
    /// checked at `slack` instead of the margin tolerance.
    pub(crate) fn crossing_with_slack(&self, x: &Point, y: &Point, a: &Point, b: &Point, slack: f64) -> Result<Point> {
        let mx = self.margin(x, a, b);
        let my = self.margin(y, a, b);
        if mx < -slack || my > slack {
            return Err(Error::PreconditionViolated(format!(
                "bisector crossing needs margin(x) >= 0 >= margin(y), got {mx:e} and {my:e}"
            )));
        }
        if self.antipodal(x, y) {
            return Err(Error::AntipodalPair);
        }
        if self.kind.is_linear() {
            // The power difference is affine in position, so it is affine in t.
            let w = if self.kind == GeometryKind::Weighted { b.weight - a.weight } else { 0.0 };
            let fx = power_margin(x, a, b) + w;
            let fy = power_margin(y, a, b) + w;
            let t = if fx == fy { 0.0 } else { (fx / (fx - fy)).clamp(0.0, 1.0) };
            let mut p = self.geodesic(x, y, t);
            p.weight = 0.0;
            return Ok(p);
        }
        Ok(self.bisect(x, y, a, b, mx, my))
    }

    fn bisect(&self, x: &Point, y: &Point, a: &Point, b: &Point, mx: f64, my: f64) -> Point {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let (mut best_t, mut best_m) = if mx.abs() <= my.abs() { (0.0, mx) } else { (1.0, my) };
        for _ in 0..MAX_BISECTION_STEPS {
            if hi - lo <= self.bisection_tolerance && best_m.abs() <= self.tolerance {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let m = self.margin(&self.geodesic(x, y, mid), a, b);
            if m.abs() < best_m.abs() {
                best_t = mid;
                best_m = m;
            }
            if m >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut p = self.geodesic(x, y, best_t);
        p.weight = 0.0;
        p
    }
}

/// `|x−b|² − |x−a|²` as `⟨a − b, 2x − a − b⟩`, which does not cancel far
/// from the sites.
fn power_margin(x: &Point, a: &Point, b: &Point) -> f64 {
    let mut s = 0.0;
    for ((xi, ai), bi) in x.coords.iter().zip(&a.coords).zip(&b.coords) {
        s += (ai - bi) * (2.0 * xi - ai - bi);
    }
    s
}

/// Great-circle distance in the stable half-chord form.
pub(crate) fn sphere_distance(x: &[f64], y: &[f64]) -> f64 {
    let d = linalg::dist(x, y);
    let s = x.iter().zip(y).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
    2.0 * d.atan2(s)
}

pub(crate) fn poincare_distance(x: &[f64], y: &[f64]) -> f64 {
    let num = linalg::dist(x, y);
    let den = ((1.0 - linalg::norm_sq(x)) * (1.0 - linalg::norm_sq(y))).sqrt();
    2.0 * (num / den).asinh()
}

fn slerp(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    let theta = sphere_distance(x, y);
    if theta < 1e-9 {
        let p = linalg::lerp(x, y, t);
        return linalg::normalize(&p).unwrap_or(p);
    }
    let s = theta.sin();
    let wx = ((1.0 - t) * theta).sin() / s;
    let wy = (t * theta).sin() / s;
    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| wx * a + wy * b).collect();
    linalg::normalize(&p).unwrap_or(p)
}

/// Möbius addition in the Poincaré ball.
pub(crate) fn mobius_add(u: &[f64], v: &[f64]) -> Vec<f64> {
    let uv = linalg::dot(u, v);
    let uu = linalg::norm_sq(u);
    let vv = linalg::norm_sq(v);
    let den = 1.0 + 2.0 * uv + uu * vv;
    let cu = (1.0 + 2.0 * uv + vv) / den;
    let cv = (1.0 - uu) / den;
    u.iter().zip(v).map(|(a, b)| cu * a + cv * b).collect()
}

/// Translate `x` to the origin, walk the diameter, translate back.
fn poincare_geodesic(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    let neg_x = linalg::scale(x, -1.0);
    let y0 = mobius_add(&neg_x, y);
    let r = linalg::norm(&y0);
    if r == 0.0 {
        return x.to_vec();
    }
    let rt = (t * r.atanh()).tanh();
    let z = linalg::scale(&y0, rt / r);
    mobius_add(x, &z)
}
