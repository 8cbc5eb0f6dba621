//! Landmark subsampling and witness complexes whose witnesses are the data
//! points themselves.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::domain::witnessed_subsets;
use super::{build_levelwise, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};
use crate::sampling;
use crate::witness::check_weak;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkMethod {
    Maxmin,
    Random,
}

impl std::str::FromStr for LandmarkMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "maxmin" | "max-min" | "farthest" => Ok(LandmarkMethod::Maxmin),
            "random" => Ok(LandmarkMethod::Random),
            other => Err(Error::InvalidParameter(format!("unknown landmark method {other:?}"))),
        }
    }
}

/// Indices into the data set, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Landmarks {
    pub indices: Vec<usize>,
    pub method: LandmarkMethod,
    pub seed: u64,
}

impl Landmarks {
    pub fn new(indices: Vec<usize>, method: LandmarkMethod, seed: u64) -> Result<Self> {
        let mut indices = indices;
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::InvalidParameter("landmark set is empty".into()));
        }
        Ok(Landmarks { indices, method, seed })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn check_count(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("cannot pick {m} landmarks from {n} points")));
    }
    Ok(())
}

/// Greedy farthest-point landmarks from a seeded uniform start.
pub fn maxmin_landmarks(sites: &[Point], g: &Geometry, m: usize, seed: u64) -> Result<Landmarks> {
    check_count(m, sites.len())?;
    let start = sampling::rng(seed).random_range(0..sites.len());
    let mut l = maxmin_landmarks_from(sites, g, m, start)?;
    l.seed = seed;
    Ok(l)
}

/// Greedy farthest-point landmarks from a given start; ties go to the lowest
/// index.
pub fn maxmin_landmarks_from(sites: &[Point], g: &Geometry, m: usize, start: usize) -> Result<Landmarks> {
    check_count(m, sites.len())?;
    if start >= sites.len() {
        return Err(Error::InvalidParameter(format!("start index {start} out of range")));
    }
    g.validate_all(sites)?;
    let mut chosen = vec![start];
    let mut nearest: Vec<f64> = sites.iter().map(|p| g.dist(p, &sites[start])).collect();
    while chosen.len() < m {
        let mut next = 0;
        for i in 1..sites.len() {
            if nearest[i] > nearest[next] {
                next = i;
            }
        }
        chosen.push(next);
        for (i, p) in sites.iter().enumerate() {
            nearest[i] = nearest[i].min(g.dist(p, &sites[next]));
        }
    }
    Landmarks::new(chosen, LandmarkMethod::Maxmin, 0)
}

pub fn random_landmarks(n_sites: usize, m: usize, seed: u64) -> Result<Landmarks> {
    check_count(m, n_sites)?;
    let idx = index::sample(&mut sampling::rng(seed), n_sites, m).into_vec();
    Landmarks::new(idx, LandmarkMethod::Random, seed)
}

/// Witness complex on the landmarks, with vertex `i` standing for
/// `landmarks.indices[i]`. A simplex is included when each of its faces has
/// a weak witness among the data points with respect to the landmark set.
pub fn witness_complex(landmarks: &Landmarks, sites: &[Point], g: &Geometry, max_dim: usize) -> Result<SimplicialComplex> {
    g.validate_all(sites)?;
    if let Some(&bad) = landmarks.indices.iter().find(|&&i| i >= sites.len()) {
        return Err(Error::InvalidParameter(format!("landmark index {bad} out of range")));
    }
    let lpts: Vec<Point> = landmarks.indices.iter().map(|&i| sites[i].clone()).collect();
    // Witnessed landmark subsets, each with the first data point witnessing it.
    let mut witnessed: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut d = vec![0.0; lpts.len()];
    for (w, x) in sites.iter().enumerate() {
        for (di, l) in d.iter_mut().zip(&lpts) {
            *di = g.dist(x, l);
        }
        witnessed_subsets(&d, max_dim + 1, g.tolerance, |tau, _, _| {
            witnessed.entry(tau.to_vec()).or_insert(w);
        });
    }
    build_levelwise(lpts.len(), max_dim, false, true, |sigma| {
        Ok(witnessed
            .get(sigma.vertices())
            .and_then(|&w| check_weak(g, &sites[w], sigma, &lpts, &[], g.tolerance).ok()))
    })
}

#[cfg(test)]
mod tests {
    use crate::witness::Simplex;
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn maxmin_one_step() {
        let g = Geometry::euclidean(1);
        let a = vec![Point::from([0.0]), Point::from([1.0]), Point::from([10.0])];
        assert_eq!(maxmin_landmarks_from(&a, &g, 2, 0).unwrap().indices, vec![0, 2]);
        assert_eq!(maxmin_landmarks(&a, &g, 3, 4).unwrap().indices, vec![0, 1, 2]);
        let one = maxmin_landmarks(&a, &g, 1, 4).unwrap();
        assert_eq!(one.indices.len(), 1);
        assert!(maxmin_landmarks(&a, &g, 0, 4).is_err());
    }

    #[test]
    fn path_complex() {
        let g = Geometry::euclidean(2);
        let a = vec![Point::from([0.0, 0.0]), Point::from([1.0, 0.0]), Point::from([2.0, 0.0])];
        let l = Landmarks::new(vec![0, 1, 2], LandmarkMethod::Maxmin, 0).unwrap();
        let c = witness_complex(&l, &a, &g, 2).unwrap();
        assert!(c.contains(&s(&[0, 1])) && c.contains(&s(&[1, 2])));
        assert!(!c.contains(&s(&[0, 2])));
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn single_landmark() {
        let g = Geometry::euclidean(2);
        let a = vec![Point::from([0.0, 0.0]), Point::from([1.0, 0.0])];
        let l = Landmarks::new(vec![1], LandmarkMethod::Random, 0).unwrap();
        let c = witness_complex(&l, &a, &g, 2).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn random_landmarks_distinct() {
        let l = random_landmarks(10, 4, 7).unwrap();
        assert_eq!(l.len(), 4);
        assert!(l.indices.windows(2).all(|w| w[0] < w[1]));
    }
}
