//! The spherical pipeline: genericity, witness balls and their coverage,
//! strong witnesses through stereographic projection, and a direct search
//! over the locus of points equidistant from a simplex's vertices.

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::SampledDomain;
use super::SamplingOptions;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryKind, MetricBall, Point, Stereographic};
use crate::linalg;
use crate::lp::{self, bounding_box, WitnessMode};
use crate::sampling;
use crate::witness::{check_strong, Simplex, WitnessCertificate};

fn require_sphere(g: &Geometry) -> Result<()> {
    if g.kind == GeometryKind::Sphere {
        Ok(())
    } else {
        Err(Error::UnsupportedGeometry(format!("expected the sphere, got {}", g.kind)))
    }
}

/// Outcome of the genericity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genericity {
    pub generic: bool,
    /// Dimension `k` of the subsphere containing the violating subset.
    pub k: Option<usize>,
    pub violating_subset: Option<Vec<usize>>,
}

/// Checks that no `k + 3` sites lie on a common `k`-sphere for `k < n`, i.e.
/// that no `(k+3)`-subset spans an affine flat of dimension `≤ k + 1`.
pub fn sphere_generic(sites: &[Point], tol: f64) -> Genericity {
    let Some(first) = sites.first() else {
        return Genericity {
            generic: true,
            k: None,
            violating_subset: None,
        };
    };
    let ambient = first.dim();
    let n = ambient.saturating_sub(1);
    for k in 0..n {
        let size = k + 3;
        if size > sites.len() {
            break;
        }
        for subset in (0..sites.len()).combinations(size) {
            let mean: Vec<f64> = (0..ambient)
                .map(|j| subset.iter().map(|&i| sites[i].coords[j]).sum::<f64>() / size as f64)
                .collect();
            let rows: Vec<Vec<f64>> = subset.iter().map(|&i| linalg::sub(&sites[i].coords, &mean)).collect();
            if linalg::rank(&rows, ambient, tol) <= k + 1 {
                return Genericity {
                    generic: false,
                    k: Some(k),
                    violating_subset: Some(subset),
                };
            }
        }
    }
    Genericity {
        generic: true,
        k: None,
        violating_subset: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "point")]
pub enum Coverage {
    Covered,
    Uncovered(Point),
}

impl Coverage {
    pub fn is_covered(&self) -> bool {
        matches!(self, Coverage::Covered)
    }
}

/// Slack on ball membership in the coverage test.
pub const COVERAGE_TOLERANCE: f64 = 1e-9;

/// Monte-Carlo coverage test: the first of `n_samples` quasi-uniform points
/// outside every ball, if any.
pub fn balls_cover_sphere(balls: &[MetricBall], n_samples: usize, seed: u64) -> Result<Coverage> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let Some(b0) = balls.first() else {
        return Err(Error::InvalidParameter("no balls given".into()));
    };
    let ambient = b0.center.dim();
    if ambient < 2 {
        return Err(Error::InvalidParameter("ball centers must lie on S^n, n >= 1".into()));
    }
    let g = Geometry::sphere(ambient - 1);
    g.validate_all(&balls.iter().map(|b| b.center.clone()).collect::<Vec<_>>())?;
    let samples = sampling::sphere_sample(ambient - 1, n_samples, seed);
    let miss = samples.par_iter().position_first(|x| {
        let x = Point::new(x.clone());
        balls.iter().all(|b| g.dist(&b.center, &x) > b.radius + COVERAGE_TOLERANCE)
    });
    Ok(match miss {
        Some(i) => Coverage::Uncovered(Point::new(samples[i].clone())),
        None => Coverage::Covered,
    })
}

/// The ball `B_τ` for every face `τ` of `sigma`: centered at the sampled weak
/// witness whose ball through the vertices of `τ` is smallest.
pub fn witness_balls(g: &Geometry, sites: &[Point], sigma: &Simplex, opts: &SamplingOptions) -> Result<Vec<(Simplex, MetricBall)>> {
    require_sphere(g)?;
    g.validate_all(sites)?;
    let domain = SampledDomain::build(g, sites, opts.finest(), opts.seed, sigma.len(), opts.tolerance)?;
    balls_from_domain(&domain, sigma)
}

fn balls_from_domain(domain: &SampledDomain, sigma: &Simplex) -> Result<Vec<(Simplex, MetricBall)>> {
    sigma
        .faces()
        .into_iter()
        .map(|tau| match domain.tightest(&tau) {
            Some((x, r)) => Ok((tau, MetricBall::new(x.clone(), r))),
            None => Err(Error::MissingWeakWitness(tau)),
        })
        .collect()
}

/// Strong witness found through a stereographic projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StereoWitness {
    pub point: Point,
    pub pole: Point,
    /// `min (d(pole, c_τ) − r_τ)` over the witness balls and the sites.
    pub pole_margin: f64,
    /// Euclidean strong witness in the projection plane.
    pub projected_witness: Point,
    pub certificate: WitnessCertificate,
}

pub fn sphere_delaunay_via_stereo(sites: &[Point], sigma: &Simplex) -> Result<StereoWitness> {
    sphere_delaunay_via_stereo_with(sites, sigma, &SamplingOptions::default())
}

/// Looks for a pole outside all witness balls of the faces of `sigma`,
/// projects from it, decides strong-witness existence with the Euclidean
/// oracle and lifts the result. `ConditionFailed` when every candidate pole
/// is covered.
pub fn sphere_delaunay_via_stereo_with(sites: &[Point], sigma: &Simplex, opts: &SamplingOptions) -> Result<StereoWitness> {
    let Some(first) = sites.first() else {
        return Err(Error::InvalidParameter("no sites".into()));
    };
    let g = Geometry::sphere(first.dim().saturating_sub(1).max(1));
    g.validate_all(sites)?;
    let domain = SampledDomain::build(&g, sites, opts.finest(), opts.seed, sigma.len(), opts.tolerance)?;
    via_stereo(&g, sites, sigma, &domain, opts)
}

fn via_stereo(g: &Geometry, sites: &[Point], sigma: &Simplex, domain: &SampledDomain, opts: &SamplingOptions) -> Result<StereoWitness> {
    let balls = balls_from_domain(domain, sigma)?;
    let mut obstacles: Vec<MetricBall> = balls.iter().map(|(_, b)| b.clone()).collect();
    obstacles.extend(sites.iter().map(|s| MetricBall::new(s.clone(), 0.0)));

    let (pole, margin) = find_pole(g, &obstacles, domain, opts.seed);
    if margin <= opts.pole_margin {
        return Err(Error::ConditionFailed { best_margin: margin });
    }
    let proj = Stereographic::new(&pole)?;
    let euclid = Geometry::euclidean(g.dim);
    let projected: Vec<Point> = sites.iter().map(|s| proj.project(s)).collect::<Result<_>>()?;
    let images: Vec<MetricBall> = balls.iter().map(|(_, b)| proj.ball_image(b)).collect::<Result<_>>()?;

    // Box around the projected sites and image balls; a strong witness lies
    // in the hull of the image centers.
    let mut extent = projected.clone();
    for b in &images {
        for k in 0..g.dim {
            for sgn in [-1.0, 1.0] {
                let mut c = b.center.coords.clone();
                c[k] += sgn * b.radius;
                extent.push(Point::new(c));
            }
        }
    }
    let (lower, upper) = bounding_box(&extent, 1.0);
    let res = lp::witness_exists_in_box(sigma, &projected, &euclid, WitnessMode::Strong, lower, upper)?;
    let Some(y) = res.point else {
        return Err(Error::CertificationFailure {
            simplex: sigma.clone(),
            reason: "projected strong system infeasible".into(),
        });
    };
    let radius = linalg::dist(&y.coords, &projected[sigma.vertices()[0]].coords);
    let cap = proj.ball_preimage(&MetricBall::new(y.clone(), radius))?;
    let x = cap.center;
    let certificate = check_strong(g, &x, sigma, sites, &[], g.certify_tolerance).map_err(|r| Error::CertificationFailure {
        simplex: sigma.clone(),
        reason: format!("lifted witness rejected: {r}"),
    })?;
    Ok(StereoWitness {
        point: x,
        pole,
        pole_margin: margin,
        projected_witness: y,
        certificate,
    })
}

const POLE_STARTS: usize = 4096;
const POLE_REFINED: usize = 8;

fn coverage_margin(g: &Geometry, s: &Point, balls: &[MetricBall]) -> f64 {
    balls
        .iter()
        .map(|b| g.dist(s, &b.center) - b.radius)
        .fold(f64::INFINITY, f64::min)
}

/// Multistart maximization of the coverage margin: score seeded starts and
/// the domain's structured points, then refine the best few by compass
/// search in the tangent space.
fn find_pole(g: &Geometry, balls: &[MetricBall], domain: &SampledDomain, seed: u64) -> (Point, f64) {
    let mut starts: Vec<Point> = sampling::sphere_sample(g.dim, POLE_STARTS, sampling::sub_seed(seed, 0x501e))
        .into_iter()
        .map(Point::new)
        .collect();
    // Antipodes of ball centers are natural candidates for uncovered points.
    starts.extend(balls.iter().map(|b| Point::new(linalg::scale(&b.center.coords, -1.0))));
    starts.extend(domain.points.iter().step_by((domain.points.len() / POLE_STARTS).max(1)).cloned());
    let scored: Vec<(usize, f64)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| (i, coverage_margin(g, s, balls)))
        .collect();
    let mut ranked = scored;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let refined: Vec<(Point, f64)> = ranked
        .iter()
        .take(POLE_REFINED)
        .map(|&(i, m)| compass_search(g, &starts[i], m, balls))
        .collect();
    refined
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one start")
}

fn compass_search(g: &Geometry, start: &Point, m0: f64, balls: &[MetricBall]) -> (Point, f64) {
    let mut s = start.clone();
    let mut best = m0;
    let mut h = 0.1;
    for _ in 0..400 {
        if h < 1e-10 {
            break;
        }
        let basis = linalg::orthogonal_complement(&s.coords);
        let mut improved = false;
        for e in &basis {
            for sgn in [1.0, -1.0] {
                let cand = Point::new(linalg::normalize(&linalg::axpy(&s.coords, sgn * h, e)).expect("nonzero"));
                let m = coverage_margin(g, &cand, balls);
                if m > best {
                    best = m;
                    s = cand;
                    improved = true;
                    break;
                }
            }
            if improved {
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (s, best)
}

/// Searches the locus of points equidistant from the vertices of `sigma`
/// for a strong witness. The locus is the unit sphere of the null space of
/// the rows `a_i − a_0`; it is sampled with `samples` points when it has
/// dimension at least one, and checked exactly when it is a pair of points.
pub fn sampled_strong_search(g: &Geometry, sites: &[Point], sigma: &Simplex, samples: usize, seed: u64) -> Result<Option<WitnessCertificate>> {
    require_sphere(g)?;
    let v = sigma.vertices();
    let accept = |x: Point| check_strong(g, &x, sigma, sites, &[], g.certify_tolerance).ok();
    if v.len() == 1 {
        return Ok(accept(sites[v[0]].clone()));
    }
    let a0 = &sites[v[0]].coords;
    let rows: Vec<Vec<f64>> = v[1..].iter().map(|&i| linalg::sub(&sites[i].coords, a0)).collect();
    let null = linalg::null_space(&rows, a0.len(), 1e-9);
    let m = null.len();
    let coeffs: Vec<Vec<f64>> = match m {
        0 => return Ok(None),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let phase = sampling::rng(seed).random_range(0.0..std::f64::consts::TAU);
            (0..samples)
                .map(|i| {
                    let t = phase + std::f64::consts::TAU * i as f64 / samples as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        3 => sampling::fibonacci_sphere(samples, seed),
        _ => {
            let mut r = sampling::rng(seed);
            (0..samples).map(|_| sampling::unit_vector(&mut r, m)).collect()
        }
    };
    let found = coeffs.par_iter().find_map_first(|c| {
        let mut x = vec![0.0; a0.len()];
        for (ci, u) in c.iter().zip(&null) {
            x = linalg::axpy(&x, *ci, u);
        }
        linalg::normalize(&x).and_then(|x| accept(Point::new(x)))
    });
    Ok(found)
}

/// Strong-witness decision on the sphere used by the complex builder:
/// stereographic pipeline first, then the equidistant-locus search.
pub(crate) fn strong_witness(
    g: &Geometry,
    sites: &[Point],
    sigma: &Simplex,
    domain: &SampledDomain,
    opts: &SamplingOptions,
) -> Result<Option<WitnessCertificate>> {
    if sigma.len() == 1 {
        return sampled_strong_search(g, sites, sigma, 1, opts.seed);
    }
    match via_stereo(g, sites, sigma, domain, opts) {
        Ok(w) => Ok(Some(w.certificate)),
        Err(Error::ConditionFailed { .. } | Error::MissingWeakWitness(_) | Error::CertificationFailure { .. }) => {
            sampled_strong_search(g, sites, sigma, opts.locus_samples, opts.seed)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn circle_points(count: usize, z: f64, phase: f64) -> Vec<Point> {
        let r = (1.0 - z * z).sqrt();
        (0..count)
            .map(|i| {
                let t = phase + 2.0 * PI * i as f64 / count as f64;
                Point::from([r * t.cos(), r * t.sin(), z])
            })
            .collect()
    }

    #[test]
    fn equator_is_not_generic() {
        let gen = sphere_generic(&circle_points(4, 0.0, 0.3), 1e-9);
        assert!(!gen.generic);
        assert_eq!(gen.k, Some(1));
        assert_eq!(gen.violating_subset, Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn latitude_circle_is_not_generic() {
        assert!(!sphere_generic(&circle_points(5, 0.5, 0.1), 1e-9).generic);
    }

    #[test]
    fn random_points_are_generic() {
        let mut r = sampling::rng(6);
        let a: Vec<Point> = (0..6).map(|_| Point::new(sampling::unit_vector(&mut r, 3))).collect();
        assert!(sphere_generic(&a, 1e-9).generic);
    }

    #[test]
    fn polar_caps_cover() {
        let n = Point::from([0.0, 0.0, 1.0]);
        let s = Point::from([0.0, 0.0, -1.0]);
        let balls = [MetricBall::new(n, 0.7), MetricBall::new(s, PI - 0.7)];
        assert!(balls_cover_sphere(&balls, 100_000, 3).unwrap().is_covered());
    }

    #[test]
    fn hemisphere_cap_leaves_gap() {
        let balls = [MetricBall::new(Point::from([0.0, 0.0, 1.0]), FRAC_PI_2)];
        match balls_cover_sphere(&balls, 1000, 3).unwrap() {
            Coverage::Uncovered(p) => assert!(p.coords[2] < 0.0),
            Coverage::Covered => panic!("half the sphere is uncovered"),
        }
    }

    #[test]
    fn clustered_cap_via_stereo_matches_projection() {
        let mut r = sampling::rng(17);
        let north = [0.0, 0.0, 1.0];
        let sites: Vec<Point> = (0..5)
            .map(|_| {
                let t = sampling::in_ball(&mut r, 2, 0.3);
                let v = [t[0], t[1], 1.0];
                Point::new(linalg::normalize(&v).unwrap())
            })
            .collect();
        assert!(sites.iter().all(|p| linalg::dot(&p.coords, &north) > 0.9));
        let g = Geometry::sphere(2);
        let opts = SamplingOptions {
            resolutions: vec![20_000],
            ..Default::default()
        };
        let weak = super::super::delaunay_weak_with(&sites, &g, 2, &super::super::DelaunayOptions {
            sampling: opts.clone(),
            ..Default::default()
        })
        .unwrap();
        let tri = weak.simplices_of_dim(2).next().expect("a triangle").clone();
        let w = sphere_delaunay_via_stereo_with(&sites, &tri, &opts).unwrap();
        assert_eq!(w.certificate.simplex, tri);
        // The same simplex is Delaunay for the projected sites.
        let proj = Stereographic::new(&w.pole).unwrap();
        let projected: Vec<Point> = sites.iter().map(|s| proj.project(s).unwrap()).collect();
        assert!(lp::witness_exists(&tri, &projected, &Geometry::euclidean(2), WitnessMode::Strong)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn locus_search_finds_circumcenter() {
        let g = Geometry::sphere(2);
        let sites = vec![
            Point::from([1.0, 0.0, 0.0]),
            Point::from([0.0, 1.0, 0.0]),
            Point::from([0.0, 0.0, 1.0]),
        ];
        let c = sampled_strong_search(&g, &sites, &Simplex::new([0, 1, 2]).unwrap(), 10, 0).unwrap().unwrap();
        let k = 1.0 / 3f64.sqrt();
        assert!(c.point.coords.iter().all(|v| (v.abs() - k).abs() < 1e-12));
    }
}
