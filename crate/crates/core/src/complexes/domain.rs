//! Finite candidate sets standing in for the continuous witness domain on
//! the sphere, the hemisphere and the hyperbolic ball.

use std::collections::HashMap;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryKind, Point};
use crate::linalg;
use crate::sampling;
use crate::witness::{check_weak, Simplex, WitnessCertificate, WitnessFamily};

/// Upper bound on tie combinations explored per candidate and size.
const MAX_TIE_COMBINATIONS: usize = 4096;
/// Equidistant points of `(n+1)`-subsets are added while there are at most
/// this many subsets.
const MAX_EQUIDISTANT_SUBSETS: usize = 200_000;

/// Calls `f(subset, gap, radius)` for every subset of size at most
/// `max_size` weakly witnessed by a point with site distances `d`, where
/// `gap = min_out − max_in ≥ −tol` and `radius = max_in`.
pub(crate) fn witnessed_subsets(d: &[f64], max_size: usize, tol: f64, mut f: impl FnMut(&[usize], f64, f64)) {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let mut tau = Vec::with_capacity(max_size);
    for k in 1..=max_size.min(d.len()) {
        let lo = d[order[k - 1]];
        let forced: Vec<usize> = order.iter().copied().take_while(|&i| d[i] < lo - tol).collect();
        let ties: Vec<usize> = order[forced.len()..]
            .iter()
            .copied()
            .take_while(|&i| d[i] <= lo + tol)
            .collect();
        let need = k - forced.len();
        let mut visit = |chosen: &[usize]| {
            tau.clear();
            tau.extend_from_slice(&forced);
            tau.extend_from_slice(chosen);
            tau.sort_unstable();
            let max_in = tau.iter().map(|&i| d[i]).fold(f64::NEG_INFINITY, f64::max);
            let min_out = (0..d.len())
                .filter(|i| tau.binary_search(i).is_err())
                .map(|i| d[i])
                .fold(f64::INFINITY, f64::min);
            let gap = min_out - max_in;
            if gap >= -tol {
                f(&tau, gap, max_in);
            }
        };
        if ties.len() == need {
            visit(&ties);
        } else {
            for chosen in ties.iter().copied().combinations(need).take(MAX_TIE_COMBINATIONS) {
                visit(&chosen);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    index: usize,
    value: f64,
}

fn keep_max(map: &mut HashMap<Vec<usize>, Best>, key: &[usize], cand: Best) {
    match map.get_mut(key) {
        Some(b) => {
            if cand.value > b.value || (cand.value == b.value && cand.index < b.index) {
                *b = cand;
            }
        }
        None => {
            map.insert(key.to_vec(), cand);
        }
    }
}

#[derive(Default)]
struct Tables {
    /// Candidate with the largest gap per witnessed subset.
    widest: HashMap<Vec<usize>, Best>,
    /// Candidate with the smallest radius per witnessed subset (stored negated).
    tightest: HashMap<Vec<usize>, Best>,
}

impl Tables {
    fn merge(mut self, other: Tables) -> Tables {
        for (k, b) in other.widest {
            keep_max(&mut self.widest, &k, b);
        }
        for (k, b) in other.tightest {
            keep_max(&mut self.tightest, &k, b);
        }
        self
    }
}

/// A candidate set together with, for every weakly witnessed subset of
/// sites, its widest-margin and its smallest-ball witness.
pub(crate) struct SampledDomain {
    pub points: Vec<Point>,
    tables: Tables,
    pub tolerance: f64,
}

impl SampledDomain {
    pub fn build(g: &Geometry, sites: &[Point], resolution: usize, seed: u64, max_size: usize, tol: f64) -> Result<Self> {
        let points = candidates(g, sites, resolution, seed)?;
        let tables = points
            .par_chunks(2048)
            .enumerate()
            .map(|(c, chunk)| {
                let mut t = Tables::default();
                let mut d = vec![0.0; sites.len()];
                for (j, x) in chunk.iter().enumerate() {
                    let index = c * 2048 + j;
                    for (di, s) in d.iter_mut().zip(sites) {
                        *di = g.dist(x, s);
                    }
                    witnessed_subsets(&d, max_size, tol, |tau, gap, radius| {
                        keep_max(&mut t.widest, tau, Best { index, value: gap });
                        keep_max(&mut t.tightest, tau, Best { index, value: -radius });
                    });
                }
                t
            })
            .reduce(Tables::default, Tables::merge);
        Ok(SampledDomain {
            points,
            tables,
            tolerance: tol,
        })
    }

    #[cfg(test)]
    pub fn is_witnessed(&self, sigma: &Simplex) -> bool {
        self.tables.widest.contains_key(sigma.vertices())
    }

    /// Candidate with the largest gap between outsiders and vertices.
    pub fn widest(&self, sigma: &Simplex) -> Option<(&Point, f64)> {
        self.tables
            .widest
            .get(sigma.vertices())
            .map(|b| (&self.points[b.index], b.value))
    }

    /// Candidate whose ball through the farthest vertex is smallest.
    pub fn tightest(&self, sigma: &Simplex) -> Option<(&Point, f64)> {
        self.tables
            .tightest
            .get(sigma.vertices())
            .map(|b| (&self.points[b.index], -b.value))
    }

    pub fn weak_certificate(&self, g: &Geometry, sites: &[Point], sigma: &Simplex) -> Option<WitnessCertificate> {
        let (x, _) = self.widest(sigma)?;
        check_weak(g, x, sigma, sites, &[], self.tolerance).ok()
    }

    pub fn family(&self, sigma: &Simplex) -> Option<WitnessFamily> {
        let mut family = WitnessFamily::new(sigma.clone());
        for face in sigma.faces() {
            let (x, _) = self.widest(&face)?;
            family.witnesses.insert(face, x.clone());
        }
        Some(family)
    }
}

/// Quasi-uniform samples of the geometry's region plus the sites and a few
/// structured points (pairwise midpoints, equidistant points of
/// `(n+1)`-subsets where they are easy to compute).
fn candidates(g: &Geometry, sites: &[Point], resolution: usize, seed: u64) -> Result<Vec<Point>> {
    let mut pts: Vec<Point> = Vec::with_capacity(resolution + sites.len() * sites.len());
    match g.kind {
        GeometryKind::Sphere => {
            pts.extend(sampling::sphere_sample(g.dim, resolution, seed).into_iter().map(Point::new));
            pts.extend(sites.iter().map(|s| Point::new(s.coords.clone())));
            pts.extend(sphere_midpoints(sites));
            pts.extend(sphere_equidistant(g, sites));
        }
        GeometryKind::Hemisphere => {
            let raw = sampling::sphere_sample(g.dim, 2 * resolution, seed);
            pts.extend(raw.into_iter().filter(|v| v[0] > 1e-12).map(Point::new));
            pts.extend(sites.iter().map(|s| Point::new(s.coords.clone())));
            pts.extend(sphere_midpoints(sites).into_iter().filter(|p| p.coords[0] > 1e-12));
            pts.extend(sphere_equidistant(g, sites).into_iter().filter(|p| p.coords[0] > 1e-12));
        }
        GeometryKind::HyperbolicBall => {
            let mut rng = sampling::rng(seed);
            pts.extend((0..resolution).map(|_| Point::new(sampling::in_ball(&mut rng, g.dim, 0.999))));
            pts.extend(sites.iter().map(|s| Point::new(s.coords.clone())));
            for (i, a) in sites.iter().enumerate() {
                for b in &sites[i + 1..] {
                    pts.push(g.geodesic(a, b, 0.5));
                }
            }
        }
        GeometryKind::Euclidean | GeometryKind::Weighted => {
            return Err(Error::UnsupportedGeometry(format!(
                "{} uses the LP oracle, not a sampled domain",
                g.kind
            )))
        }
    }
    Ok(pts)
}

fn sphere_midpoints(sites: &[Point]) -> Vec<Point> {
    let mut out = Vec::new();
    for (i, a) in sites.iter().enumerate() {
        for b in &sites[i + 1..] {
            if let Some(m) = linalg::normalize(&linalg::add(&a.coords, &b.coords)) {
                out.push(Point::new(m));
            }
        }
    }
    out
}

/// Both points of `S^n` equidistant from each `(n+1)`-subset of sites in
/// general position.
fn sphere_equidistant(g: &Geometry, sites: &[Point]) -> Vec<Point> {
    let k = g.dim + 1;
    if sites.len() < k || n_choose_k(sites.len(), k) > MAX_EQUIDISTANT_SUBSETS {
        return Vec::new();
    }
    let mut out = Vec::new();
    for subset in (0..sites.len()).combinations(k) {
        if let Some(u) = equidistant_axis(sites, &subset) {
            out.push(Point::new(linalg::scale(&u, -1.0)));
            out.push(Point::new(u));
        }
    }
    out
}

/// Unit vector spanning `{x : ⟨x, a_i − a_0⟩ = 0}` when that space is a line.
pub(crate) fn equidistant_axis(sites: &[Point], subset: &[usize]) -> Option<Vec<f64>> {
    let a0 = &sites[subset[0]].coords;
    let rows: Vec<Vec<f64>> = subset[1..].iter().map(|&i| linalg::sub(&sites[i].coords, a0)).collect();
    let null = linalg::null_space(&rows, a0.len(), 1e-9);
    (null.len() == 1).then(|| null.into_iter().next().expect("one vector"))
}

pub(crate) fn n_choose_k(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}
