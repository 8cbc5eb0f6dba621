//! Statistical self-check of the comparator axioms on a geometry.

use rand::Rng;
use serde::Serialize;

use super::{Geometry, GeometryKind, Point};
use crate::error::Error;
use crate::linalg;
use crate::sampling;

/// Attempts allowed when rejection-sampling a point into a region.
const MAX_REJECTIONS: usize = 64;
/// Geodesic parameters probed for the convexity check.
const CONVEXITY_PROBES: [f64; 7] = [0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95];
/// Every this many samples the full sphere gets an engineered antipodal pair.
const ANTIPODAL_PROBE_PERIOD: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomViolation {
    pub sample: usize,
    pub description: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomOutcome {
    pub checked: usize,
    pub failed: usize,
    pub first_counterexample: Option<AxiomViolation>,
}

impl AxiomOutcome {
    fn pass(&mut self) {
        self.checked += 1;
    }

    fn fail(&mut self, sample: usize, description: String, points: Vec<Point>) {
        self.checked += 1;
        self.failed += 1;
        if self.first_counterexample.is_none() {
            self.first_counterexample = Some(AxiomViolation {
                sample,
                description,
                points,
            });
        }
    }
}

/// Pass/fail counts per axiom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub geometry: GeometryKind,
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    /// `R_ab` closed under taking geodesic intermediates.
    pub convexity: AxiomOutcome,
    /// A geodesic from `R_ab` to `R_ba` meets `H_ab`.
    pub crossing: AxiomOutcome,
    /// `H_ab ∩ R_ac = H_ab ∩ R_bc` and `H_ab ∩ R_ca = H_ab ∩ R_cb`.
    pub bisector_symmetry: AxiomOutcome,
    /// `R_ab ∩ R_bc ⊂ R_ac`.
    pub transitivity: AxiomOutcome,
}

impl AxiomReport {
    pub fn total_failures(&self) -> usize {
        self.convexity.failed + self.crossing.failed + self.bisector_symmetry.failed + self.transitivity.failed
    }

    pub fn all_pass(&self) -> bool {
        self.total_failures() == 0
    }
}

/// Samples random site triples and point pairs and checks the four
/// comparator axioms plus transitivity. On the full sphere every eighth
/// convexity sample uses an engineered near-antipodal pair on a bisector,
/// where no unique geodesic exists; those are reported as convexity
/// failures.
pub fn check_axioms(g: &Geometry, n_samples: usize, seed: u64) -> AxiomReport {
    let mut rng = sampling::rng(seed);
    let mut report = AxiomReport {
        geometry: g.kind,
        dim: g.dim,
        samples: n_samples,
        seed,
        convexity: AxiomOutcome::default(),
        crossing: AxiomOutcome::default(),
        bisector_symmetry: AxiomOutcome::default(),
        transitivity: AxiomOutcome::default(),
    };
    let tol = g.tolerance;

    for i in 0..n_samples {
        let a = sampling::random_point(g, &mut rng);
        let b = sampling::random_point(g, &mut rng);
        let c = sampling::random_point(g, &mut rng);

        // Convexity of R_ab.
        let probe = g.kind == GeometryKind::Sphere && i % ANTIPODAL_PROBE_PERIOD == 0;
        let pair = if probe {
            antipodal_pair_on_bisector(g, &a, &b)
        } else {
            sample_in_region(g, &mut rng, &a, &b).zip(sample_in_region(g, &mut rng, &a, &b))
        };
        if let Some((x, y)) = pair {
            match g.geodesic_point(&x, &y, 0.5) {
                Err(Error::AntipodalPair) => report.convexity.fail(
                    i,
                    "no unique geodesic between antipodal points of R_ab".into(),
                    vec![a.clone(), b.clone(), x, y],
                ),
                Err(e) => report.convexity.fail(i, e.to_string(), vec![a.clone(), b.clone(), x, y]),
                Ok(_) => {
                    let worst = CONVEXITY_PROBES
                        .iter()
                        .map(|&t| g.margin(&g.geodesic(&x, &y, t), &a, &b))
                        .fold(f64::INFINITY, f64::min);
                    if worst < -tol {
                        report.convexity.fail(
                            i,
                            format!("geodesic leaves R_ab (margin {worst:e})"),
                            vec![a.clone(), b.clone(), x, y],
                        );
                    } else {
                        report.convexity.pass();
                    }
                }
            }
        }

        // Crossing, then bisector symmetry at the crossing point.
        let x = sample_in_region(g, &mut rng, &a, &b);
        let y = sample_in_region(g, &mut rng, &b, &a);
        if let (Some(x), Some(y)) = (x, y) {
            match g.bisector_crossing(&x, &y, &a, &b) {
                Ok(p) => {
                    let m = g.margin(&p, &a, &b);
                    let gap = g.dist(&x, &p) + g.dist(&p, &y) - g.dist(&x, &y);
                    if m.abs() > tol || gap.abs() > 1e-8 {
                        report.crossing.fail(
                            i,
                            format!("crossing margin {m:e}, geodesic gap {gap:e}"),
                            vec![a.clone(), b.clone(), x, y, p],
                        );
                    } else {
                        report.crossing.pass();
                        check_symmetry(g, &mut report.bisector_symmetry, i, &p, &a, &b, &c);
                    }
                }
                Err(e) => report.crossing.fail(i, e.to_string(), vec![a.clone(), b.clone(), x, y]),
            }
        }

        // Transitivity: order the sites so x ∈ R_ab ∩ R_bc.
        let x = sampling::random_point(g, &mut rng);
        let mut sites = [&a, &b, &c];
        sites.sort_by(|p, q| g.margin(&x, q, p).total_cmp(&0.0));
        let [s0, s1, s2] = sites;
        let (m01, m12, m02) = (g.margin(&x, s0, s1), g.margin(&x, s1, s2), g.margin(&x, s0, s2));
        if m01 >= -tol && m12 >= -tol {
            if m02 < -2.0 * tol {
                report.transitivity.fail(
                    i,
                    format!("x in R_ab and R_bc but margin to R_ac is {m02:e}"),
                    vec![s0.clone(), s1.clone(), s2.clone(), x],
                );
            } else {
                report.transitivity.pass();
            }
        }
    }
    report
}

fn check_symmetry(
    g: &Geometry,
    out: &mut AxiomOutcome,
    sample: usize,
    p: &Point,
    a: &Point,
    b: &Point,
    c: &Point,
) {
    let tol = g.tolerance;
    let disagree = |u: f64, v: f64| (u > tol && v < -tol) || (v > tol && u < -tol);
    let (ac, bc) = (g.margin(p, a, c), g.margin(p, b, c));
    let (ca, cb) = (g.margin(p, c, a), g.margin(p, c, b));
    if disagree(ac, bc) || disagree(ca, cb) {
        out.fail(
            sample,
            format!("on H_ab: R_ac margin {ac:e} vs R_bc margin {bc:e}"),
            vec![a.clone(), b.clone(), c.clone(), p.clone()],
        );
    } else {
        out.pass();
    }
}

fn sample_in_region<R: Rng + ?Sized>(g: &Geometry, rng: &mut R, a: &Point, b: &Point) -> Option<Point> {
    (0..MAX_REJECTIONS)
        .map(|_| sampling::random_point(g, rng))
        .find(|x| g.margin(x, a, b) >= 0.0)
}

/// A point `x` on the great circle `H_ab` and its antipode nudged by
/// `1e-13` into `R_ab`: both in `R_ab`, no unique geodesic between them.
fn antipodal_pair_on_bisector(g: &Geometry, a: &Point, b: &Point) -> Option<(Point, Point)> {
    if g.antipodal(a, b) {
        return None;
    }
    let x = g.bisector_crossing(a, b, a, b).ok()?;
    let diff = linalg::sub(&a.coords, &b.coords);
    let y = linalg::normalize(&linalg::axpy(&linalg::scale(&x.coords, -1.0), 1e-13, &diff))?;
    Some((x, Point::new(y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_passes() {
        let r = check_axioms(&Geometry::euclidean(2), 1000, 1);
        assert!(r.all_pass(), "{r:?}");
        assert!(r.convexity.checked > 900);
        assert!(r.crossing.checked > 500);
        assert_eq!(r.transitivity.checked, 1000);
    }

    #[test]
    fn hemisphere_passes() {
        let r = check_axioms(&Geometry::hemisphere(2), 1000, 2);
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn sphere_reports_convexity_failure() {
        let r = check_axioms(&Geometry::sphere(2), 100, 3);
        assert!(r.convexity.failed > 0);
        let cx = r.convexity.first_counterexample.unwrap();
        assert!(cx.description.contains("antipodal"));
        assert_eq!(r.crossing.failed, 0);
    }
}
