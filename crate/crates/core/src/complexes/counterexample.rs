//! Spherical instances where weak witnesses for every face do not give a
//! strong witness: the polar caps and the twin simplices.

use std::f64::consts::{FRAC_PI_2, PI};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::domain::equidistant_axis;
use super::sphere::sampled_strong_search;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};
use crate::linalg;
use crate::sampling;
use crate::witness::{check_weak, Simplex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// `p` sites equally spaced on the circle at `latitude` on `S^2`, plus one
    /// site north of it.
    PolarCaps { p: usize, latitude: f64 },
    /// A regular `k`-simplex of radius `epsilon` and a regular
    /// `(n−k)`-simplex of radius `epsilon_prime` in orthogonal tangent
    /// subspaces at the north pole of `S^n`.
    TwinSimplex {
        n: usize,
        k: usize,
        epsilon: f64,
        epsilon_prime: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceExpectation {
    pub face: Simplex,
    pub weakly_witnessed: bool,
    /// A known weak witness, when the construction provides one.
    pub witness: Option<Point>,
    /// Whether a witness disk inside the small cap around the pole is
    /// expected; only set for twin simplices.
    pub small_witness: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub geometry: Geometry,
    pub sites: Vec<Point>,
    pub simplex: Simplex,
    pub faces: Vec<FaceExpectation>,
    pub strong_witness: bool,
    pub description: String,
    /// North pole of the construction.
    pub pole: Point,
    /// Geodesic bound `d(pole, x) + r` defining a small witness disk.
    pub small_bound: f64,
}

/// Result of re-checking the expectations by computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationCheck {
    pub holds: bool,
    pub strong_witness_found: bool,
    pub failures: Vec<String>,
}

pub fn counterexample(kind: CounterexampleKind) -> Result<Counterexample> {
    match kind {
        CounterexampleKind::PolarCaps { p, latitude } => polar_caps(p, latitude),
        CounterexampleKind::TwinSimplex {
            n,
            k,
            epsilon,
            epsilon_prime,
        } => twin_simplex(n, k, epsilon, epsilon_prime),
    }
}

fn polar(colat: f64, lon: f64) -> Point {
    Point::from([colat.sin() * lon.cos(), colat.sin() * lon.sin(), colat.cos()])
}

fn polar_caps(p: usize, latitude: f64) -> Result<Counterexample> {
    if p == 0 {
        return Err(Error::InvalidParameter("polar caps need p >= 1".into()));
    }
    if !(latitude > 0.0 && latitude < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("latitude {latitude} not in (0, pi/2)")));
    }
    let colat = FRAC_PI_2 - latitude;
    let mut sites = vec![polar(0.5 * colat, PI / p as f64)];
    sites.extend((0..p).map(|i| polar(colat, 2.0 * PI * i as f64 / p as f64)));
    let simplex = Simplex::new(0..=p)?;
    let north = Point::from([0.0, 0.0, 1.0]);
    let south = Point::from([0.0, 0.0, -1.0]);
    let faces = simplex
        .faces()
        .into_iter()
        .map(|face| FaceExpectation {
            witness: Some(if face.contains(0) { north.clone() } else { south.clone() }),
            face,
            weakly_witnessed: true,
            small_witness: None,
        })
        .collect();
    Ok(Counterexample {
        kind: CounterexampleKind::PolarCaps { p, latitude },
        geometry: Geometry::sphere(2),
        sites,
        simplex,
        faces,
        strong_witness: p <= 2,
        description: format!(
            "{p} sites on the circle of latitude {latitude} and one site north of it; faces containing site 0 are \
             witnessed by the north pole, the others by the south pole; the caps they bound cover the sphere"
        ),
        pole: north,
        small_bound: PI,
    })
}

/// Vertices of a regular `m`-simplex centered at the origin of `R^m` with
/// circumradius `r`.
fn regular_simplex(m: usize, r: f64) -> Vec<Vec<f64>> {
    let ones = vec![1.0 / ((m + 1) as f64).sqrt(); m + 1];
    let basis = linalg::orthogonal_complement(&ones);
    (0..=m)
        .map(|i| {
            let mut e = vec![-1.0 / (m + 1) as f64; m + 1];
            e[i] += 1.0;
            let v: Vec<f64> = basis.iter().map(|b| linalg::dot(b, &e)).collect();
            linalg::scale(&v, r / linalg::norm(&v))
        })
        .collect()
}

fn twin_simplex(n: usize, k: usize, epsilon: f64, epsilon_prime: f64) -> Result<Counterexample> {
    if !(k >= 1 && k < n) {
        return Err(Error::InvalidParameter(format!("need n > k >= 1, got n = {n}, k = {k}")));
    }
    if !(epsilon_prime > 0.0 && epsilon_prime < epsilon && epsilon <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "need 0.5 >= epsilon > epsilon' > 0, got {epsilon}, {epsilon_prime}"
        )));
    }
    let lift = |v: Vec<f64>| {
        let mut w = v;
        w.push(1.0);
        Point::new(linalg::normalize(&w).expect("nonzero"))
    };
    let mut sites = Vec::with_capacity(n + 2);
    for a in regular_simplex(k, epsilon) {
        let mut v = a;
        v.resize(n, 0.0);
        sites.push(lift(v));
    }
    for b in regular_simplex(n - k, epsilon_prime) {
        let mut v = vec![0.0; k];
        v.extend(b);
        sites.push(lift(v));
    }
    let simplex = Simplex::new(0..n + 2)?;
    let tau_a = Simplex::new(0..=k)?;
    let mut pole = vec![0.0; n + 1];
    pole[n] = 1.0;
    let mut south = vec![0.0; n + 1];
    south[n] = -1.0;
    let faces = simplex
        .faces()
        .into_iter()
        .map(|face| {
            let is_a = face == tau_a;
            FaceExpectation {
                witness: is_a.then(|| Point::new(south.clone())),
                face,
                weakly_witnessed: true,
                small_witness: Some(!is_a),
            }
        })
        .collect();
    Ok(Counterexample {
        kind: CounterexampleKind::TwinSimplex {
            n,
            k,
            epsilon,
            epsilon_prime,
        },
        geometry: Geometry::sphere(n),
        sites,
        simplex,
        faces,
        strong_witness: false,
        description: format!(
            "regular {k}-simplex of radius {epsilon} and regular {}-simplex of radius {epsilon_prime} near the north \
             pole of S^{n}; every face except {tau_a} has a witness disk within {} of the pole",
            n - k,
            4.0 * epsilon
        ),
        pole: Point::new(pole),
        small_bound: 4.0 * epsilon,
    })
}

/// Smallest witness disk for `tau` within the cap of radius `bound` around
/// `pole`, searched over `resolution` seeded points of the cap plus the
/// equidistant points of `(n+1)`-subsets. Returns the witness and
/// `d(pole, x) + r`, where `r` is the distance to the farthest vertex.
pub fn small_witness_disk(
    g: &Geometry,
    sites: &[Point],
    tau: &Simplex,
    pole: &Point,
    bound: f64,
    resolution: usize,
    seed: u64,
) -> Result<Option<(Point, f64)>> {
    g.validate_all(sites)?;
    g.validate(pole)?;
    let basis = linalg::orthogonal_complement(&pole.coords);
    let mut rng = sampling::rng(seed);
    let mut cands: Vec<Point> = (0..resolution)
        .map(|_| {
            let v = sampling::in_ball(&mut rng, g.dim, bound);
            let len = linalg::norm(&v);
            let mut dir = vec![0.0; pole.dim()];
            for (c, b) in v.iter().zip(&basis) {
                dir = linalg::axpy(&dir, *c, b);
            }
            let x = if len > 0.0 {
                linalg::add(&linalg::scale(&pole.coords, len.cos()), &linalg::scale(&dir, len.sin() / len))
            } else {
                pole.coords.clone()
            };
            Point::new(linalg::normalize(&x).expect("nonzero"))
        })
        .collect();
    cands.push(pole.clone());
    cands.extend(sites.iter().cloned());
    for subset in (0..sites.len()).combinations((g.dim + 1).min(sites.len())) {
        if let Some(u) = equidistant_axis(sites, &subset) {
            cands.push(Point::new(linalg::scale(&u, -1.0)));
            cands.push(Point::new(u));
        }
    }
    let mut best: Option<(Point, f64)> = None;
    for x in cands {
        if check_weak(g, &x, tau, sites, &[], 1e-9).is_err() {
            continue;
        }
        let r = tau.vertices().iter().map(|&a| g.dist(&x, &sites[a])).fold(0.0, f64::max);
        let size = g.dist(pole, &x) + r;
        if size <= bound && best.as_ref().is_none_or(|b| size < b.1) {
            best = Some((x, size));
        }
    }
    Ok(best)
}

impl Counterexample {
    /// Recomputes every expectation: known witnesses are certified, small
    /// disks searched for, and the strong witness looked for on the
    /// equidistant locus.
    pub fn check(&self, resolution: usize, seed: u64) -> Result<ExpectationCheck> {
        let g = &self.geometry;
        let mut failures = Vec::new();
        for (i, fe) in self.faces.iter().enumerate() {
            if let Some(x) = &fe.witness {
                let ok = check_weak(g, x, &fe.face, &self.sites, &[], g.tolerance).is_ok();
                if ok != fe.weakly_witnessed {
                    failures.push(format!("face {}: recorded witness check gave {ok}", fe.face));
                }
            }
            if let Some(expected) = fe.small_witness {
                let found = small_witness_disk(
                    g,
                    &self.sites,
                    &fe.face,
                    &self.pole,
                    self.small_bound,
                    resolution,
                    sampling::sub_seed(seed, i as u64),
                )?
                .is_some();
                if found != expected {
                    failures.push(format!("face {}: small witness disk expected {expected}, found {found}", fe.face));
                }
                if found && !fe.weakly_witnessed {
                    failures.push(format!("face {}: witnessed although no witness was expected", fe.face));
                }
            }
        }
        let strong = sampled_strong_search(g, &self.sites, &self.simplex, resolution.max(1), seed)?.is_some();
        if strong != self.strong_witness {
            failures.push(format!(
                "simplex {}: strong witness expected {}, found {strong}",
                self.simplex, self.strong_witness
            ));
        }
        Ok(ExpectationCheck {
            holds: failures.is_empty(),
            strong_witness_found: strong,
            failures,
        })
    }
}

/// Random rotation of the instance, for tests that should not depend on the
/// chosen axes.
pub fn rotate_sites(sites: &[Point], seed: u64) -> Vec<Point> {
    let dim = sites.first().map_or(0, Point::dim);
    let mut rng = sampling::rng(seed);
    let cols: Vec<Vec<f64>> = (0..dim).map(|_| sampling::gaussian_vec(&mut rng, dim)).collect();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for c in cols {
        let mut v = c;
        for b in &q {
            let d = linalg::dot(&v, b);
            v = linalg::axpy(&v, -d, b);
        }
        q.push(linalg::normalize(&v).expect("independent with probability one"));
    }
    sites
        .iter()
        .map(|p| Point::new(q.iter().map(|row| linalg::dot(row, &p.coords)).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::is_robust_witness;

    #[test]
    fn polar_caps_layout() {
        let c = counterexample(CounterexampleKind::PolarCaps {
            p: 3,
            latitude: PI / 3.0,
        })
        .unwrap();
        assert_eq!(c.sites.len(), 4);
        assert_eq!(c.faces.len(), 15);
        assert!(!c.strong_witness);
        let g = &c.geometry;
        // Site 0 strictly north of the circle.
        assert!(c.sites[0].coords[2] > c.sites[1].coords[2]);
        // The north pole is a robust witness for [a_0].
        assert!(is_robust_witness(g, &c.pole, &Simplex::vertex(0), &c.sites).unwrap());
    }

    #[test]
    fn polar_caps_expectations_hold() {
        for p in 1..=3 {
            let c = counterexample(CounterexampleKind::PolarCaps { p, latitude: PI / 3.0 }).unwrap();
            let r = c.check(20_000, 1).unwrap();
            assert!(r.holds, "p = {p}: {:?}", r.failures);
        }
    }

    #[test]
    fn regular_simplex_radius() {
        let v = regular_simplex(2, 0.5);
        assert_eq!(v.len(), 3);
        for a in &v {
            assert!((linalg::norm(a) - 0.5).abs() < 1e-14);
        }
        let side = linalg::dist(&v[0], &v[1]);
        assert!((side - 0.5 * 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn twin_simplex_rejects_bad_parameters() {
        let bad = |n, k, e, ep| {
            counterexample(CounterexampleKind::TwinSimplex {
                n,
                k,
                epsilon: e,
                epsilon_prime: ep,
            })
            .is_err()
        };
        assert!(bad(2, 2, 0.1, 0.09));
        assert!(bad(2, 1, 0.1, 0.2));
        assert!(bad(2, 1, 0.1, 0.0));
    }

    #[test]
    fn twin_simplex_admissible_radii() {
        let twin = |ep| {
            counterexample(CounterexampleKind::TwinSimplex {
                n: 2,
                k: 1,
                epsilon: 0.1,
                epsilon_prime: ep,
            })
            .unwrap()
        };
        let c = twin(0.09);
        assert_eq!(c.sites.len(), 4);
        assert_eq!(c.faces.len(), 15);
        let r = c.check(20_000, 3).unwrap();
        assert!(r.holds, "{:?}", r.failures);
        assert!(!r.strong_witness_found);
        // With the second simplex much smaller, [a_0, a_1, b_0] is only
        // witnessed far from the pole.
        let c = twin(0.02);
        let face = Simplex::new([0, 1, 2]).unwrap();
        let small = small_witness_disk(&c.geometry, &c.sites, &face, &c.pole, c.small_bound, 20_000, 3).unwrap();
        assert!(small.is_none());
        assert!(!c.check(20_000, 3).unwrap().holds);
    }

    #[test]
    fn rotation_preserves_distances() {
        let c = counterexample(CounterexampleKind::PolarCaps { p: 3, latitude: 0.7 }).unwrap();
        let r = rotate_sites(&c.sites, 4);
        let g = &c.geometry;
        for i in 0..4 {
            for j in 0..4 {
                assert!((g.dist(&c.sites[i], &c.sites[j]) - g.dist(&r[i], &r[j])).abs() < 1e-12);
            }
        }
    }
}
