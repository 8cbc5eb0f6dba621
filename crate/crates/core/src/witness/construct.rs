//! Strong witnesses from families of weak witnesses.
//!
//! Given weak witnesses `x_I` for every nonempty vertex subset `I` of
//! `σ = [a_0 ... a_p]`, one bisector-reduction step produces weak witnesses
//! `y_J` for every face of `τ = [a_1 ... a_p]`, all lying on the bisector
//! `H_{a_0 a_1}` and valid with `a_0` removed from the site list. Each `y_J`
//! is the crossing of `H_{a_0 a_1}` with a geodesic between two of the
//! `x_I`. After `p` steps the single remaining witness is a strong witness
//! for `σ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_strong, check_weak, Simplex};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};

/// Weak witnesses `I ↦ x_I` for the nonempty faces of a simplex, relative to
/// the site list with `excluded` sites removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub simplex: Simplex,
    pub witnesses: BTreeMap<Simplex, Point>,
    /// Sites dropped by earlier reduction steps.
    pub excluded: Vec<usize>,
}

impl WitnessFamily {
    pub fn new(simplex: Simplex) -> Self {
        WitnessFamily {
            simplex,
            witnesses: BTreeMap::new(),
            excluded: Vec::new(),
        }
    }

    pub fn insert(&mut self, face: Simplex, x: Point) -> Result<()> {
        if !face.is_face_of(&self.simplex) {
            return Err(Error::InvalidParameter(format!("{face} is not a face of {}", self.simplex)));
        }
        self.witnesses.insert(face, x);
        Ok(())
    }

    pub fn get(&self, face: &Simplex) -> Option<&Point> {
        self.witnesses.get(face)
    }

    pub fn is_complete(&self) -> bool {
        self.simplex.faces().iter().all(|f| self.witnesses.contains_key(f))
    }

    fn require(&self, face: &Simplex) -> Result<&Point> {
        self.get(face).ok_or_else(|| {
            Error::PreconditionViolated(format!("family for {} has no witness for {face}", self.simplex))
        })
    }

    /// Checks completeness and that every `x_I` is a weak witness for `I`
    /// within `tol`.
    pub fn validate(&self, g: &Geometry, sites: &[Point], tol: f64) -> Result<()> {
        for face in self.simplex.faces() {
            let x = self.require(&face)?;
            check_weak(g, x, &face, sites, &self.excluded, tol).map_err(|r| Error::CertificationFailure {
                simplex: face.clone(),
                reason: format!("family witness is not weak: {r}"),
            })?;
        }
        Ok(())
    }
}

/// One inductive step: returns the family for `σ` minus its first vertex,
/// with every witness on the bisector of the first two vertices and relative
/// to the sites without the first vertex.
pub fn reduce_to_bisector(g: &Geometry, family: &WitnessFamily, sites: &[Point]) -> Result<WitnessFamily> {
    let v = family.simplex.vertices();
    if v.len() < 2 {
        return Err(Error::PreconditionViolated("reduction needs at least an edge".into()));
    }
    let (a0, a1) = (v[0], v[1]);
    let (p0, p1) = (&sites[a0], &sites[a1]);
    let tau = Simplex::from_sorted(v[1..].to_vec());

    let mut excluded = family.excluded.clone();
    excluded.push(a0);
    excluded.sort_unstable();
    let mut next = WitnessFamily {
        simplex: tau.clone(),
        witnesses: BTreeMap::new(),
        excluded,
    };
    let certify = g.certify_tolerance;

    for j in tau.faces() {
        let y = if j.contains(a1) {
            let x01k = family.require(&j.with(a0))?;
            if g.margin(x01k, p0, p1) >= 0.0 {
                // x_{01K} on a_0's side, x_{1K} on a_1's side.
                g.crossing_with_slack(x01k, family.require(&j)?, p0, p1, certify)?
            } else {
                let x0k = match j.without(a1) {
                    Some(k) => family.require(&k.with(a0))?,
                    None => family.require(&Simplex::vertex(a0))?,
                };
                g.crossing_with_slack(x0k, x01k, p0, p1, certify)?
            }
        } else {
            let xj = family.require(&j)?;
            if g.margin(xj, p1, p0) >= 0.0 {
                g.crossing_with_slack(family.require(&j.with(a0))?, xj, p0, p1, certify)?
            } else {
                g.crossing_with_slack(xj, family.require(&j.with(a1))?, p0, p1, certify)?
            }
        };
        let on_bisector = g.margin(&y, p0, p1);
        if on_bisector.abs() > certify {
            return Err(Error::CertificationFailure {
                simplex: j,
                reason: format!("reduced witness off the bisector by {on_bisector:e}"),
            });
        }
        check_weak(g, &y, &j, sites, &next.excluded, certify).map_err(|r| Error::CertificationFailure {
            simplex: j.clone(),
            reason: format!("reduced witness is not weak: {r}"),
        })?;
        next.witnesses.insert(j, y);
    }
    Ok(next)
}

/// Runs `p` reduction steps and certifies the result as a strong witness for
/// the family's simplex, with tolerance `g.certify_tolerance`.
pub fn construct_strong_witness(g: &Geometry, family: &WitnessFamily, sites: &[Point]) -> Result<Point> {
    if !family.is_complete() {
        return Err(Error::PreconditionViolated(format!(
            "family for {} is incomplete",
            family.simplex
        )));
    }
    let mut current = family.clone();
    while current.simplex.len() > 1 {
        current = reduce_to_bisector(g, &current, sites)?;
    }
    let x = current.require(&current.simplex)?.clone();
    check_strong(g, &x, &family.simplex, sites, &family.excluded, g.certify_tolerance).map_err(|r| {
        Error::CertificationFailure {
            simplex: family.simplex.clone(),
            reason: format!("constructed point is not a strong witness: {r}"),
        }
    })?;
    Ok(x)
}
