//! Turning weak witnesses on the sphere into robust ones.
//!
//! At a weak witness `x` that is not robust, some vertices `a_i` and some
//! outsiders `b_j` are tied at the same distance, so they lie on a small
//! sphere `C` centered at `x`. Under genericity the tied points are
//! affinely independent, hence their two convex hulls can be strictly
//! separated inside the tangent space at `x`. Moving `x` a little along the
//! separating normal `w` (towards the `a_i`) makes every tie strict, since
//! the squared chord distance changes at rate `-2⟨w, a⟩`.

use serde::{Deserialize, Serialize};

use super::{check_weak, is_robust_witness, Simplex};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryKind, Point};
use crate::hull;
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustifyConfig {
    /// First perturbation size tried.
    pub initial_epsilon: f64,
    /// Geometric shrink factor between attempts.
    pub ratio: f64,
    pub max_steps: usize,
    /// Relative tolerance deciding which distances are tied.
    pub tie_tolerance: f64,
    /// Singular-value threshold for affine independence of the tied points.
    pub independence_tolerance: f64,
    /// Convergence tolerance for the closest pair between the hulls.
    pub hull_tolerance: f64,
}

impl Default for RobustifyConfig {
    fn default() -> Self {
        RobustifyConfig {
            initial_epsilon: 0.1,
            ratio: 0.5,
            max_steps: 60,
            tie_tolerance: 1e-9,
            independence_tolerance: 1e-9,
            hull_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustificationCertificate {
    pub simplex: Simplex,
    pub input: Point,
    /// Vertices of the simplex tied with an outsider at the input.
    pub tied_vertices: Vec<usize>,
    /// Outsiders tied with a vertex at the input.
    pub tied_outsiders: Vec<usize>,
    /// Unit tangent direction at the input separating the two tied groups;
    /// empty when the input was already robust.
    pub direction: Vec<f64>,
    pub epsilon: f64,
    pub output: Point,
    /// Minimum comparator slack at the output.
    pub min_margin: f64,
}

pub fn robustify(g: &Geometry, x: &Point, sigma: &Simplex, sites: &[Point]) -> Result<RobustificationCertificate> {
    robustify_with(g, x, sigma, sites, &RobustifyConfig::default())
}

/// Perturbs a weak witness on the sphere into a robust one.
pub fn robustify_with(
    g: &Geometry,
    x: &Point,
    sigma: &Simplex,
    sites: &[Point],
    cfg: &RobustifyConfig,
) -> Result<RobustificationCertificate> {
    if g.kind != GeometryKind::Sphere {
        return Err(Error::UnsupportedGeometry(format!("robustify runs on the sphere, not {}", g.kind)));
    }
    g.validate(x)?;
    let cert = check_weak(g, x, sigma, sites, &[], g.tolerance)
        .map_err(|r| Error::PreconditionViolated(format!("input is not a weak witness: {r}")))?;
    let min_margin = |p: &Point| {
        super::slacks(g, p, sigma, sites, &[]).iter().map(|s| s.margin).fold(f64::INFINITY, f64::min)
    };
    if is_robust_witness(g, x, sigma, sites)? {
        return Ok(RobustificationCertificate {
            simplex: sigma.clone(),
            input: x.clone(),
            tied_vertices: Vec::new(),
            tied_outsiders: Vec::new(),
            direction: Vec::new(),
            epsilon: 0.0,
            output: x.clone(),
            min_margin: cert.min_margin(),
        });
    }

    let dist: Vec<f64> = sites.iter().map(|s| g.dist(x, s)).collect();
    let inside = sigma.vertices().iter().map(|&a| dist[a]).fold(f64::NEG_INFINITY, f64::max);
    let outside = (0..sites.len())
        .filter(|b| !sigma.contains(*b))
        .map(|b| dist[b])
        .fold(f64::INFINITY, f64::min);
    let radius = 0.5 * (inside + outside);
    let tie = (cfg.tie_tolerance * radius).max(2.0 * g.tolerance);
    let tied_vertices: Vec<usize> = sigma.vertices().iter().copied().filter(|&a| radius - dist[a] <= tie).collect();
    let tied_outsiders: Vec<usize> = (0..sites.len())
        .filter(|&b| !sigma.contains(b) && dist[b] - radius <= tie)
        .collect();

    // Tangent-space images: subtracting the x component is a translation
    // within the affine plane cutting out the tie sphere.
    let tangent = |i: usize| {
        let c = linalg::dot(&sites[i].coords, &x.coords);
        linalg::axpy(&sites[i].coords, -c, &x.coords)
    };
    let va: Vec<Vec<f64>> = tied_vertices.iter().map(|&i| tangent(i)).collect();
    let vb: Vec<Vec<f64>> = tied_outsiders.iter().map(|&i| tangent(i)).collect();

    let tied = va.len() + vb.len();
    let all: Vec<&Vec<f64>> = va.iter().chain(&vb).collect();
    let diffs: Vec<Vec<f64>> = all[1..].iter().map(|p| linalg::sub(p, all[0])).collect();
    if tied > g.dim + 1 || linalg::rank(&diffs, x.dim(), cfg.independence_tolerance) < tied - 1 {
        return Err(Error::GenericityViolation { tied });
    }

    let (pa, pb) = hull::closest_points(&va, &vb, cfg.hull_tolerance);
    let gap = linalg::sub(&pa, &pb);
    // Stay in the tangent space despite rounding.
    let gap = linalg::axpy(&gap, -linalg::dot(&gap, &x.coords), &x.coords);
    let direction = linalg::normalize(&gap)
        .filter(|_| linalg::norm(&linalg::sub(&pa, &pb)) > cfg.independence_tolerance)
        .ok_or(Error::GenericityViolation { tied })?;

    let mut epsilon = cfg.initial_epsilon;
    for _ in 0..cfg.max_steps {
        let moved = linalg::axpy(&x.coords, epsilon, &direction);
        let out = Point::new(linalg::normalize(&moved).expect("nonzero"));
        if is_robust_witness(g, &out, sigma, sites)? {
            let m = min_margin(&out);
            return Ok(RobustificationCertificate {
                simplex: sigma.clone(),
                input: x.clone(),
                tied_vertices,
                tied_outsiders,
                direction,
                epsilon,
                output: out,
                min_margin: m,
            });
        }
        epsilon *= cfg.ratio;
    }
    Err(Error::SearchExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn already_robust_unchanged() {
        let g = Geometry::sphere(2);
        let a = vec![Point::from([1.0, 0.0, 0.0]), Point::from([0.0, 1.0, 0.0])];
        let c = robustify(&g, &a[0], &Simplex::vertex(0), &a).unwrap();
        assert_eq!(c.epsilon, 0.0);
        assert_eq!(c.output, a[0]);
    }

    #[test]
    fn tie_broken() {
        let g = Geometry::sphere(2);
        let a = vec![Point::from([1.0, 0.0, 0.0]), Point::from([0.0, 1.0, 0.0])];
        let x = Point::from([FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        let c = robustify(&g, &x, &Simplex::vertex(0), &a).unwrap();
        assert_eq!(c.tied_vertices, vec![0]);
        assert_eq!(c.tied_outsiders, vec![1]);
        assert!(c.epsilon > 0.0);
        assert!(g.dist(&c.output, &a[0]) < g.dist(&c.output, &a[1]));
        assert!(is_robust_witness(&g, &c.output, &Simplex::vertex(0), &a).unwrap());
        assert!(c.min_margin > 0.0);
    }

    #[test]
    fn great_circle_degeneracy() {
        let g = Geometry::sphere(2);
        let a: Vec<Point> = (0..4)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 * k as f64 + 0.3;
                Point::from([t.cos(), t.sin(), 0.0])
            })
            .collect();
        let pole = Point::from([0.0, 0.0, 1.0]);
        let err = robustify(&g, &pole, &Simplex::new([0, 1]).unwrap(), &a).unwrap_err();
        assert!(matches!(err, Error::GenericityViolation { tied: 4 }));
    }

    #[test]
    fn not_weak_rejected() {
        let g = Geometry::sphere(2);
        let a = vec![Point::from([1.0, 0.0, 0.0]), Point::from([0.0, 1.0, 0.0])];
        let err = robustify(&g, &a[1], &Simplex::vertex(0), &a).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }
}
