//! Weak, strong and robust witness predicates.
//!
//! A point `x` is a weak witness for a simplex `σ` with respect to a site
//! list `A` when every vertex of `σ` is at least as close to `x` (in the
//! geometry's comparator) as every site outside `σ`. It is a strong witness
//! when, in addition, all vertices of `σ` are equally close. On the sphere,
//! a robust witness has all those comparisons strict.

mod construct;
mod robust;

pub use construct::{construct_strong_witness, reduce_to_bisector, WitnessFamily};
pub use robust::{robustify, robustify_with, RobustificationCertificate, RobustifyConfig};

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};

/// A simplex as a strictly increasing list of site indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; rejects empty input and repeated indices.
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(Error::InvalidParameter("a simplex needs at least one vertex".into()));
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!("repeated vertex in {v:?}")));
        }
        Ok(Simplex(v))
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(!v.is_empty() && v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    /// All nonempty faces, including `self`, ordered by size then
    /// lexicographically.
    pub fn faces(&self) -> Vec<Simplex> {
        (1..=self.len())
            .flat_map(|k| self.0.iter().copied().combinations(k))
            .map(Simplex)
            .collect()
    }

    /// Faces of codimension one (empty for a vertex).
    pub fn facets(&self) -> Vec<Simplex> {
        if self.len() == 1 {
            return Vec::new();
        }
        (0..self.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                Simplex(v)
            })
            .collect()
    }

    /// `self` with `v` removed; `None` if that would leave nothing.
    pub fn without(&self, v: usize) -> Option<Simplex> {
        let w: Vec<usize> = self.0.iter().copied().filter(|&u| u != v).collect();
        (!w.is_empty()).then_some(Simplex(w))
    }

    pub fn with(&self, v: usize) -> Simplex {
        let mut w = self.0.clone();
        if let Err(pos) = w.binary_search(&v) {
            w.insert(pos, v);
        }
        Simplex(w)
    }
}

impl TryFrom<Vec<usize>> for Simplex {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<usize> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.iter().join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Weak,
    Strong,
    Robust,
}

/// Comparator slack between a vertex and an outsider at the witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub vertex: usize,
    pub outsider: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub point: Point,
    pub simplex: Simplex,
    pub kind: WitnessKind,
    pub slacks: Vec<Slack>,
    /// Largest comparator gap between two vertices of the simplex.
    pub spread: f64,
    pub tolerance: f64,
}

impl WitnessCertificate {
    /// Minimum slack; `+inf` when the simplex uses every site.
    pub fn min_margin(&self) -> f64 {
        self.slacks.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Refusal {
    /// An outsider is strictly closer than a vertex.
    Violated { vertex: usize, outsider: usize, margin: f64 },
    /// The vertices are not equidistant.
    Unequal { first: usize, second: usize, gap: f64 },
    /// Vertex index out of range or simplex covering an excluded site.
    InvalidSimplex { simplex: Simplex },
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refusal::Violated { vertex, outsider, margin } => {
                write!(f, "site {outsider} is closer than vertex {vertex} (margin {margin:e})")
            }
            Refusal::Unequal { first, second, gap } => {
                write!(f, "vertices {first} and {second} are not equidistant (gap {gap:e})")
            }
            Refusal::InvalidSimplex { simplex } => write!(f, "invalid simplex {simplex}"),
        }
    }
}

/// Margins `margin(x, a, b)` for every vertex `a` and every active outsider `b`.
pub(crate) fn slacks(g: &Geometry, x: &Point, sigma: &Simplex, sites: &[Point], excluded: &[usize]) -> Vec<Slack> {
    let mut out = Vec::with_capacity(sigma.len() * sites.len());
    for (b, pb) in sites.iter().enumerate() {
        if sigma.contains(b) || excluded.contains(&b) {
            continue;
        }
        for &a in sigma.vertices() {
            out.push(Slack {
                vertex: a,
                outsider: b,
                margin: g.margin(x, &sites[a], pb),
            });
        }
    }
    out
}

/// Largest `|margin(x, a_i, a_j)|` over vertex pairs, with the worst pair.
fn spread(g: &Geometry, x: &Point, sigma: &Simplex, sites: &[Point]) -> (f64, usize, usize) {
    let v = sigma.vertices();
    let mut worst = (0.0, v[0], v[0]);
    for (i, &a) in v.iter().enumerate() {
        for &b in &v[i + 1..] {
            let m = g.margin(x, &sites[a], &sites[b]).abs();
            if m > worst.0 {
                worst = (m, a, b);
            }
        }
    }
    worst
}

fn valid_simplex(sigma: &Simplex, n_sites: usize, excluded: &[usize]) -> bool {
    sigma.vertices().iter().all(|&v| v < n_sites && !excluded.contains(&v))
}

pub(crate) fn check_weak(
    g: &Geometry,
    x: &Point,
    sigma: &Simplex,
    sites: &[Point],
    excluded: &[usize],
    tol: f64,
) -> Result<WitnessCertificate, Refusal> {
    if !valid_simplex(sigma, sites.len(), excluded) {
        return Err(Refusal::InvalidSimplex { simplex: sigma.clone() });
    }
    let slacks = slacks(g, x, sigma, sites, excluded);
    if let Some(worst) = slacks.iter().min_by(|p, q| p.margin.total_cmp(&q.margin)) {
        if worst.margin < -tol {
            return Err(Refusal::Violated {
                vertex: worst.vertex,
                outsider: worst.outsider,
                margin: worst.margin,
            });
        }
    }
    let (spread, _, _) = spread(g, x, sigma, sites);
    Ok(WitnessCertificate {
        point: x.clone(),
        simplex: sigma.clone(),
        kind: WitnessKind::Weak,
        slacks,
        spread,
        tolerance: tol,
    })
}

pub(crate) fn check_strong(
    g: &Geometry,
    x: &Point,
    sigma: &Simplex,
    sites: &[Point],
    excluded: &[usize],
    tol: f64,
) -> Result<WitnessCertificate, Refusal> {
    let mut cert = check_weak(g, x, sigma, sites, excluded, tol)?;
    let (gap, first, second) = spread(g, x, sigma, sites);
    if gap > tol {
        return Err(Refusal::Unequal { first, second, gap });
    }
    cert.kind = WitnessKind::Strong;
    Ok(cert)
}

/// Certifies `x` as a weak witness for `sigma` with respect to `sites`, or
/// reports the most violated vertex/outsider pair.
pub fn is_weak_witness(g: &Geometry, x: &Point, sigma: &Simplex, sites: &[Point]) -> Result<WitnessCertificate, Refusal> {
    check_weak(g, x, sigma, sites, &[], g.tolerance)
}

/// Weak witness whose vertices are additionally equidistant (equal power
/// for the weighted geometry).
pub fn is_strong_witness(g: &Geometry, x: &Point, sigma: &Simplex, sites: &[Point]) -> Result<WitnessCertificate, Refusal> {
    check_strong(g, x, sigma, sites, &[], g.tolerance)
}

/// Robust witness test on the sphere: every vertex strictly closer than
/// every outsider, beyond the geometry tolerance.
pub fn is_robust_witness(g: &Geometry, x: &Point, sigma: &Simplex, sites: &[Point]) -> Result<bool> {
    if !g.kind.is_spherical() {
        return Err(Error::UnsupportedGeometry(format!(
            "robust witnesses are defined on the sphere, not {}",
            g.kind
        )));
    }
    if !valid_simplex(sigma, sites.len(), &[]) {
        return Err(Error::InvalidParameter(format!("simplex {sigma} out of range")));
    }
    Ok(slacks(g, x, sigma, sites, &[]).iter().all(|s| s.margin > g.tolerance))
}

/// Certificate of robustness, for reporting.
pub fn robust_certificate(g: &Geometry, x: &Point, sigma: &Simplex, sites: &[Point]) -> Option<WitnessCertificate> {
    if !g.kind.is_spherical() {
        return None;
    }
    let mut cert = check_weak(g, x, sigma, sites, &[], g.tolerance).ok()?;
    if cert.slacks.iter().all(|s| s.margin > g.tolerance) {
        cert.kind = WitnessKind::Robust;
        Some(cert)
    } else {
        None
    }
}
