//! Simplicial complexes built from witnesses: strong and weak Delaunay
//! complexes, witness complexes on landmarks, and the spherical pipeline.

mod counterexample;
mod domain;
mod landmarks;
mod sphere;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use counterexample::{
    counterexample, rotate_sites, small_witness_disk, Counterexample, CounterexampleKind, ExpectationCheck, FaceExpectation,
};
pub use landmarks::{maxmin_landmarks, maxmin_landmarks_from, random_landmarks, witness_complex, LandmarkMethod, Landmarks};
pub use sphere::{
    balls_cover_sphere, sampled_strong_search, sphere_delaunay_via_stereo, sphere_delaunay_via_stereo_with,
    sphere_generic, witness_balls, Coverage, Genericity, StereoWitness,
};

pub(crate) use domain::SampledDomain;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryKind, Point};
use crate::lp::{self, OracleConfig, WitnessMode};
use crate::witness::{check_strong, check_weak, construct_strong_witness, Simplex, WitnessCertificate, WitnessFamily};

/// Face-closed set of simplices on vertices `0..n_vertices`, with optional
/// witness certificates keyed by simplex.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    pub n_vertices: usize,
    simplices: BTreeSet<Simplex>,
    #[serde(skip)]
    certificates: BTreeMap<Simplex, WitnessCertificate>,
}

impl SimplicialComplex {
    pub fn new(n_vertices: usize) -> Self {
        SimplicialComplex {
            n_vertices,
            simplices: BTreeSet::new(),
            certificates: BTreeMap::new(),
        }
    }

    /// Inserts `sigma` together with all of its faces.
    pub fn insert(&mut self, sigma: &Simplex) -> Result<()> {
        if let Some(&v) = sigma.vertices().last() {
            if v >= self.n_vertices {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} out of range for {} vertices",
                    self.n_vertices
                )));
            }
        }
        if self.simplices.contains(sigma) {
            return Ok(());
        }
        for f in sigma.faces() {
            self.simplices.insert(f);
        }
        Ok(())
    }

    pub fn insert_certified(&mut self, cert: WitnessCertificate) -> Result<()> {
        self.insert(&cert.simplex)?;
        self.certificates.insert(cert.simplex.clone(), cert);
        Ok(())
    }

    pub fn contains(&self, sigma: &Simplex) -> bool {
        self.simplices.contains(sigma)
    }

    /// Simplices in lexicographic order of their vertex lists.
    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn certificate(&self, sigma: &Simplex) -> Option<&WitnessCertificate> {
        self.certificates.get(sigma)
    }

    pub fn certificates(&self) -> &BTreeMap<Simplex, WitnessCertificate> {
        &self.certificates
    }

    pub fn clear_certificates(&mut self) {
        self.certificates.clear();
    }

    /// Largest simplex dimension, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(Simplex::dim).max()
    }

    pub fn simplices_of_dim(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dim() == d)
    }

    /// Number of simplices of each dimension `0..=dimension`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dimension().map_or(0, |d| d + 1)];
        for s in &self.simplices {
            f[s.dim()] += 1;
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Simplices of dimension at most `d`, keeping their certificates.
    pub fn skeleton(&self, d: usize) -> SimplicialComplex {
        SimplicialComplex {
            n_vertices: self.n_vertices,
            simplices: self.simplices.iter().filter(|s| s.dim() <= d).cloned().collect(),
            certificates: self
                .certificates
                .iter()
                .filter(|(s, _)| s.dim() <= d)
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_face_closed(&self) -> bool {
        self.simplices
            .iter()
            .all(|s| s.facets().iter().all(|f| self.simplices.contains(f)))
    }

    /// Same simplex set, ignoring certificates.
    pub fn same_simplices(&self, other: &SimplicialComplex) -> bool {
        self.n_vertices == other.n_vertices && self.simplices == other.simplices
    }

    /// Simplices present in exactly one of the two complexes.
    pub fn symmetric_difference<'a>(&'a self, other: &'a SimplicialComplex) -> Vec<&'a Simplex> {
        self.simplices.symmetric_difference(&other.simplices).collect()
    }

    /// Number of connected components of the 1-skeleton.
    pub fn connected_components(&self) -> usize {
        let vertices: Vec<usize> = self.simplices_of_dim(0).map(|s| s.vertices()[0]).collect();
        let mut parent: BTreeMap<usize, usize> = vertices.iter().map(|&v| (v, v)).collect();
        fn find(parent: &mut BTreeMap<usize, usize>, v: usize) -> usize {
            let p = parent[&v];
            if p == v {
                return v;
            }
            let r = find(parent, p);
            parent.insert(v, r);
            r
        }
        for e in self.simplices_of_dim(1) {
            let (a, b) = (find(&mut parent, e.vertices()[0]), find(&mut parent, e.vertices()[1]));
            if a != b {
                parent.insert(a.max(b), a.min(b));
            }
        }
        vertices.iter().filter(|&&v| find(&mut parent, v) == v).count()
    }

    /// Cycle rank `E − V + C` of the 1-skeleton, its first Betti number as a
    /// graph.
    pub fn graph_cycle_rank(&self) -> i64 {
        let f = self.f_vector();
        let v = *f.first().unwrap_or(&0) as i64;
        let e = *f.get(1).unwrap_or(&0) as i64;
        e - v + self.connected_components() as i64
    }
}

/// Settings for the complex builders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaunayOptions {
    /// Keep a witness certificate for every simplex found.
    pub certificates: bool,
    /// Evaluate candidate simplices of a level in parallel. Results do not
    /// depend on this flag.
    pub parallel: bool,
    pub oracle: OracleConfig,
    pub sampling: SamplingOptions,
}

impl Default for DelaunayOptions {
    fn default() -> Self {
        DelaunayOptions {
            certificates: false,
            parallel: true,
            oracle: OracleConfig::default(),
            sampling: SamplingOptions::default(),
        }
    }
}

/// Witness search over sampled domains, for geometries without a linear
/// oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingOptions {
    /// Candidate counts tried in turn; a face is reported without a weak
    /// witness only if every resolution misses it.
    pub resolutions: Vec<usize>,
    pub seed: u64,
    /// Weak-witness acceptance slack for sampled candidates.
    pub tolerance: f64,
    /// Minimum uncovered margin required of a stereographic pole.
    pub pole_margin: f64,
    /// Points sampled on the equidistant locus by the strong search.
    pub locus_samples: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            resolutions: vec![10_000, 100_000],
            seed: 0,
            tolerance: 1e-8,
            pole_margin: 1e-6,
            locus_samples: 100_000,
        }
    }
}

impl SamplingOptions {
    pub(crate) fn finest(&self) -> usize {
        self.resolutions.iter().copied().max().unwrap_or(100_000)
    }
}

/// Default top dimension: `n + 1` for the convex geometries, `n` on the sphere.
pub fn default_max_dim(g: &Geometry) -> usize {
    if g.kind == GeometryKind::Sphere {
        g.dim
    } else {
        g.dim + 1
    }
}

/// Adds candidate simplices level by level: a `(k+1)`-simplex is tested only
/// when all of its facets were accepted. `test` returns the certificate for
/// an accepted simplex.
pub(crate) fn build_levelwise<F>(n: usize, max_dim: usize, parallel: bool, keep: bool, test: F) -> Result<SimplicialComplex>
where
    F: Fn(&Simplex) -> Result<Option<WitnessCertificate>> + Sync,
{
    let mut complex = SimplicialComplex::new(n);
    let mut level: Vec<Simplex> = (0..n).map(Simplex::vertex).collect();
    for _ in 0..=max_dim {
        if level.is_empty() {
            break;
        }
        let results: Vec<Option<WitnessCertificate>> = if parallel {
            level.par_iter().map(&test).collect::<Result<_>>()?
        } else {
            level.iter().map(&test).collect::<Result<_>>()?
        };
        let mut accepted = Vec::new();
        for (sigma, r) in level.into_iter().zip(results) {
            if let Some(cert) = r {
                complex.simplices.insert(sigma.clone());
                if keep {
                    complex.certificates.insert(sigma.clone(), cert);
                }
                accepted.push(sigma);
            }
        }
        level = Vec::new();
        for sigma in &accepted {
            let last = *sigma.vertices().last().expect("nonempty");
            for v in last + 1..n {
                let tau = sigma.with(v);
                if tau.facets().iter().all(|f| complex.simplices.contains(f)) {
                    level.push(tau);
                }
            }
        }
    }
    Ok(complex)
}

fn check_sizes(sites: &[Point], g: &Geometry) -> Result<()> {
    g.validate_all(sites)?;
    Ok(())
}

/// Delaunay complex up to `max_dim`: simplices with a certified strong witness.
pub fn delaunay_strong(sites: &[Point], g: &Geometry, max_dim: usize) -> Result<SimplicialComplex> {
    delaunay_strong_with(sites, g, max_dim, &DelaunayOptions::default())
}

pub fn delaunay_strong_with(
    sites: &[Point],
    g: &Geometry,
    max_dim: usize,
    opts: &DelaunayOptions,
) -> Result<SimplicialComplex> {
    check_sizes(sites, g)?;
    let n = sites.len();
    match g.kind {
        GeometryKind::Euclidean | GeometryKind::Weighted => {
            build_levelwise(n, max_dim, opts.parallel, opts.certificates, |sigma| {
                let r = lp::witness_exists_with(sigma, sites, g, WitnessMode::Strong, &opts.oracle)?;
                Ok(r.point.and_then(|x| check_strong(g, &x, sigma, sites, &[], g.certify_tolerance).ok()))
            })
        }
        GeometryKind::Sphere => {
            let domain = SampledDomain::build(g, sites, opts.sampling.finest(), opts.sampling.seed, max_dim + 1, opts.sampling.tolerance)?;
            build_levelwise(n, max_dim, opts.parallel, opts.certificates, |sigma| {
                sphere::strong_witness(g, sites, sigma, &domain, &opts.sampling)
            })
        }
        GeometryKind::HyperbolicBall | GeometryKind::Hemisphere => {
            let domains = sampled_domains(g, sites, max_dim + 1, &opts.sampling)?;
            build_levelwise(n, max_dim, opts.parallel, opts.certificates, |sigma| {
                constructed_strong_witness(g, sites, sigma, &domains)
            })
        }
    }
}

/// Complex of simplices all of whose faces have a weak witness. The witness
/// domain is all of space for the linear geometries (decided by the LP
/// oracle) and a sampled candidate set otherwise.
pub fn delaunay_weak(sites: &[Point], g: &Geometry, max_dim: usize) -> Result<SimplicialComplex> {
    delaunay_weak_with(sites, g, max_dim, &DelaunayOptions::default())
}

pub fn delaunay_weak_with(
    sites: &[Point],
    g: &Geometry,
    max_dim: usize,
    opts: &DelaunayOptions,
) -> Result<SimplicialComplex> {
    check_sizes(sites, g)?;
    let n = sites.len();
    match g.kind {
        GeometryKind::Euclidean | GeometryKind::Weighted => {
            build_levelwise(n, max_dim, opts.parallel, opts.certificates, |sigma| {
                let r = lp::witness_exists_with(sigma, sites, g, WitnessMode::Weak, &opts.oracle)?;
                Ok(r.point.and_then(|x| check_weak(g, &x, sigma, sites, &[], g.certify_tolerance).ok()))
            })
        }
        GeometryKind::Sphere => {
            let domain = SampledDomain::build(g, sites, opts.sampling.finest(), opts.sampling.seed, max_dim + 1, opts.sampling.tolerance)?;
            build_levelwise(n, max_dim, false, opts.certificates, |sigma| Ok(domain.weak_certificate(g, sites, sigma)))
        }
        GeometryKind::HyperbolicBall | GeometryKind::Hemisphere => {
            let domains = sampled_domains(g, sites, max_dim + 1, &opts.sampling)?;
            build_levelwise(n, max_dim, false, opts.certificates, |sigma| {
                Ok(domains.iter().find_map(|d| d.weak_certificate(g, sites, sigma)))
            })
        }
    }
}

/// Largest dimension for which the sampled convex geometries are supported.
pub const MAX_SAMPLED_DIM: usize = 3;

fn sampled_domains(g: &Geometry, sites: &[Point], max_size: usize, opts: &SamplingOptions) -> Result<Vec<SampledDomain>> {
    if g.dim > MAX_SAMPLED_DIM {
        return Err(Error::UnsupportedGeometry(format!(
            "sampled witness search for {} is limited to dimension {MAX_SAMPLED_DIM}",
            g.kind
        )));
    }
    let mut res = opts.resolutions.clone();
    res.sort_unstable();
    res.dedup();
    res.iter()
        .map(|&r| SampledDomain::build(g, sites, r, opts.seed, max_size, opts.tolerance))
        .collect()
}

/// Construct-and-certify: gather a weak witness for every face from the
/// sampled domains, coarse first, and run the bisector construction. Absent
/// only when no resolution witnesses some face.
fn constructed_strong_witness(
    g: &Geometry,
    sites: &[Point],
    sigma: &Simplex,
    domains: &[SampledDomain],
) -> Result<Option<WitnessCertificate>> {
    let mut family = WitnessFamily::new(sigma.clone());
    for face in sigma.faces() {
        match domains.iter().find_map(|d| d.widest(&face)) {
            Some((x, _)) => {
                family.witnesses.insert(face, x.clone());
            }
            None => return Ok(None),
        }
    }
    let x = construct_strong_witness(g, &family, sites)?;
    Ok(check_strong(g, &x, sigma, sites, &[], g.certify_tolerance).ok())
}

/// Weak witnesses for the faces of `sigma` taken from a sampled domain
/// (widest-margin candidate per face).
pub fn sampled_witness_family(
    g: &Geometry,
    sites: &[Point],
    sigma: &Simplex,
    resolution: usize,
    seed: u64,
) -> Result<Option<WitnessFamily>> {
    let domain = SampledDomain::build(g, sites, resolution, seed, sigma.len(), 1e-8)?;
    Ok(domain.family(sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn insert_closes_faces() {
        let mut c = SimplicialComplex::new(4);
        c.insert(&s(&[0, 1, 2])).unwrap();
        assert_eq!(c.len(), 7);
        assert!(c.is_face_closed());
        assert_eq!(c.f_vector(), vec![3, 3, 1]);
        assert_eq!(c.euler_characteristic(), 1);
        assert!(c.insert(&s(&[4])).is_err());
    }

    #[test]
    fn triangle_complex() {
        let g = Geometry::euclidean(2);
        let a = vec![Point::from([0.0, 0.0]), Point::from([1.0, 0.1]), Point::from([0.2, 0.9])];
        let c = delaunay_strong(&a, &g, 2).unwrap();
        assert_eq!(c.len(), 7);
    }

    #[test]
    fn square_has_cocircular_tetrahedron() {
        let g = Geometry::euclidean(2);
        let a = vec![
            Point::from([0.0, 0.0]),
            Point::from([1.0, 0.0]),
            Point::from([1.0, 1.0]),
            Point::from([0.0, 1.0]),
        ];
        let c = delaunay_strong(&a, &g, 3).unwrap();
        assert!(c.contains(&s(&[0, 1, 2, 3])));
        assert!(c.same_simplices(&delaunay_weak(&a, &g, 3).unwrap()));
    }

    #[test]
    fn noncyclic_quad_two_triangles() {
        let g = Geometry::euclidean(2);
        let a = vec![
            Point::from([0.0, 0.0]),
            Point::from([1.0, 0.0]),
            Point::from([1.0, 1.0]),
            Point::from([0.0, 0.9]),
        ];
        let c = delaunay_strong(&a, &g, 3).unwrap();
        let tri: Vec<&Simplex> = c.simplices_of_dim(2).collect();
        assert_eq!(tri, vec![&s(&[0, 1, 3]), &s(&[1, 2, 3])]);
        assert!(c.contains(&s(&[1, 3])) && !c.contains(&s(&[0, 2])));
        assert_eq!(c.dimension(), Some(2));
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = Geometry::euclidean(2);
        let mut r = crate::sampling::rng(5);
        let a: Vec<Point> = (0..8).map(|_| crate::sampling::random_point(&g, &mut r)).collect();
        let par = delaunay_strong(&a, &g, 3).unwrap();
        let opts = DelaunayOptions {
            parallel: false,
            ..Default::default()
        };
        assert_eq!(par, delaunay_strong_with(&a, &g, 3, &opts).unwrap());
    }

    #[test]
    fn certificates_recertify() {
        let g = Geometry::weighted(2);
        let mut r = crate::sampling::rng(9);
        let a: Vec<Point> = (0..6).map(|_| crate::sampling::random_point(&g, &mut r)).collect();
        let opts = DelaunayOptions {
            certificates: true,
            ..Default::default()
        };
        let c = delaunay_strong_with(&a, &g, 3, &opts).unwrap();
        assert_eq!(c.certificates().len(), c.len());
        for (sigma, cert) in c.certificates() {
            assert!(check_strong(&g, &cert.point, sigma, &a, &[], g.certify_tolerance).is_ok());
        }
    }

    #[test]
    fn hyperbolic_triangle_constructed() {
        let g = Geometry::hyperbolic_ball(2);
        let a = vec![Point::from([0.1, 0.0]), Point::from([-0.3, 0.4]), Point::from([-0.2, -0.5])];
        let opts = DelaunayOptions {
            certificates: true,
            ..Default::default()
        };
        let c = delaunay_strong_with(&a, &g, 2, &opts).unwrap();
        assert_eq!(c.len(), 7);
        let w = delaunay_weak(&a, &g, 2).unwrap();
        assert!(c.same_simplices(&w));
    }
}
