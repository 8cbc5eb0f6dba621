//! Linear feasibility oracle for the Euclidean and weighted geometries.
//!
//! Squaring `|x − a| ≤ |x − b|` cancels `|x|²`, leaving the halfspace
//! `2⟨b − a, x⟩ ≤ |b|² − |a|² + w_b − w_a` (weights are zero in the
//! Euclidean case). Witness existence is then feasibility of a small LP,
//! decided over a bounding box around the sites.

mod simplex;

use serde::{Deserialize, Serialize};

pub use simplex::{LinearProgram, LpOutcome};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};
use crate::linalg;
use crate::witness::{Simplex, WitnessFamily};

pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_BOX_INFLATION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessMode {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub point: Option<Point>,
    /// Minimum inequality slack `r − ⟨c, x⟩` at the point; infinite when the
    /// system has no inequalities.
    pub margin: f64,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }

    fn infeasible() -> Self {
        FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            point: None,
            margin: f64::NEG_INFINITY,
        }
    }
}

/// Equalities `⟨c, x⟩ = r`, inequalities `⟨c, x⟩ ≤ r` and an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub dim: usize,
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub inequalities: Vec<(Vec<f64>, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// The box extends this many diameters of the sites beyond their
    /// bounding box on every axis.
    pub box_inflation: f64,
    pub feasibility_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            box_inflation: DEFAULT_BOX_INFLATION,
            feasibility_tolerance: FEASIBILITY_TOLERANCE,
        }
    }
}

fn require_linear(g: &Geometry) -> Result<()> {
    if g.kind.is_linear() {
        Ok(())
    } else {
        Err(Error::UnsupportedGeometry(format!("the LP oracle needs a linear comparator, not {}", g.kind)))
    }
}

fn weight(g: &Geometry, p: &Point) -> f64 {
    if g.kind == crate::geometry::GeometryKind::Weighted {
        p.weight
    } else {
        0.0
    }
}

/// Per-axis box `[min − f·diam, max + f·diam]` around the sites.
pub fn bounding_box(sites: &[Point], inflation: f64) -> (Vec<f64>, Vec<f64>) {
    let dim = sites[0].dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in sites {
        for k in 0..dim {
            lo[k] = lo[k].min(p.coords[k]);
            hi[k] = hi[k].max(p.coords[k]);
        }
    }
    let mut diam: f64 = 0.0;
    for (i, p) in sites.iter().enumerate() {
        for q in &sites[i + 1..] {
            diam = diam.max(linalg::dist(&p.coords, &q.coords));
        }
    }
    let pad = inflation * if diam > 0.0 { diam } else { 1.0 };
    (lo.iter().map(|v| v - pad).collect(), hi.iter().map(|v| v + pad).collect())
}

impl LinearSystem {
    /// Witness constraints for `sigma` over the default inflated box.
    pub fn witness(g: &Geometry, sigma: &Simplex, sites: &[Point], mode: WitnessMode, inflation: f64) -> Result<Self> {
        let (lower, upper) = bounding_box(sites, inflation);
        Self::witness_in_box(g, sigma, sites, mode, lower, upper)
    }

    pub fn witness_in_box(
        g: &Geometry,
        sigma: &Simplex,
        sites: &[Point],
        mode: WitnessMode,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        require_linear(g)?;
        g.validate_all(sites)?;
        if sigma.vertices().iter().any(|&v| v >= sites.len()) {
            return Err(Error::InvalidParameter(format!("simplex {sigma} out of range")));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) || lower.len() != g.dim || upper.len() != g.dim {
            return Err(Error::InvalidParameter("empty or malformed box".into()));
        }
        // Row for "a at least as close as b": 2⟨b − a, x⟩ ≤ |b|² − |a|² + w_b − w_a.
        let row = |a: &Point, b: &Point| {
            let c = linalg::scale(&linalg::sub(&b.coords, &a.coords), 2.0);
            let r = linalg::norm_sq(&b.coords) - linalg::norm_sq(&a.coords) + weight(g, b) - weight(g, a);
            (c, r)
        };
        let mut inequalities = Vec::new();
        for (b, pb) in sites.iter().enumerate() {
            if sigma.contains(b) {
                continue;
            }
            for &a in sigma.vertices() {
                inequalities.push(row(&sites[a], pb));
            }
        }
        let mut equalities = Vec::new();
        if mode == WitnessMode::Strong {
            let a0 = &sites[sigma.vertices()[0]];
            for &ai in &sigma.vertices()[1..] {
                // |x − a_i|² + w_i = |x − a_0|² + w_0.
                equalities.push(row(&sites[ai], a0));
            }
        }
        Ok(LinearSystem {
            dim: g.dim,
            equalities,
            inequalities,
            lower,
            upper,
        })
    }

    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.inequalities
            .iter()
            .map(|(c, r)| r - linalg::dot(c, x))
            .fold(f64::INFINITY, f64::min)
    }

    fn program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.dim);
        lp.equalities = self.equalities.clone();
        lp.inequalities = self.inequalities.clone();
        lp.lower = self.lower.clone();
        lp.upper = self.upper.clone();
        lp
    }

    /// Moves `x` onto the equality flat by a least-squares correction,
    /// removing the simplex's rounding drift.
    fn polish(&self, x: Vec<f64>) -> Vec<f64> {
        if self.equalities.is_empty() {
            return x;
        }
        let rows: Vec<Vec<f64>> = self.equalities.iter().map(|(c, _)| c.clone()).collect();
        let resid: Vec<f64> = self.equalities.iter().map(|(c, r)| linalg::dot(c, &x) - r).collect();
        match linalg::least_squares(&rows, self.dim, &resid, 1e-12) {
            Some(d) => linalg::sub(&x, &d),
            None => x,
        }
    }

    /// Phase-one feasibility over the box, then over all of `R^n` when the
    /// box has no solution: witnesses of thin simplices can lie arbitrarily
    /// far from the sites, and the box must not change the answer.
    pub fn feasibility(&self, tol: f64) -> FeasibilityResult {
        let x = match self.program().solve(tol) {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => self.unboxed_point(tol),
        };
        match x {
            Some(x) => {
                let x = self.polish(x);
                FeasibilityResult {
                    status: FeasibilityStatus::Feasible,
                    margin: self.min_slack(&x),
                    point: Some(Point::new(x)),
                }
            }
            None => FeasibilityResult::infeasible(),
        }
    }

    /// Phase-one feasibility restricted to the box.
    pub fn feasibility_in_box(&self, tol: f64) -> FeasibilityResult {
        match self.program().solve(tol) {
            LpOutcome::Optimal { x, .. } => {
                let x = self.polish(x);
                FeasibilityResult {
                    status: FeasibilityStatus::Feasible,
                    margin: self.min_slack(&x),
                    point: Some(Point::new(x)),
                }
            }
            _ => FeasibilityResult::infeasible(),
        }
    }

    /// Solution nearest the box center in the L1 norm, with `x = c + u − v`
    /// for `u, v ≥ 0`.
    fn unboxed_point(&self, tol: f64) -> Option<Vec<f64>> {
        let n = self.dim;
        let c: Vec<f64> = self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect();
        let split = |(a, r): &(Vec<f64>, f64)| {
            let mut row = a.clone();
            row.extend(a.iter().map(|v| -v));
            (row, r - linalg::dot(a, &c))
        };
        let mut lp = LinearProgram::new(2 * n);
        lp.objective = vec![1.0; 2 * n];
        lp.equalities = self.equalities.iter().map(split).collect();
        lp.inequalities = self.inequalities.iter().map(split).collect();
        lp.lower = vec![0.0; 2 * n];
        lp.upper = vec![f64::INFINITY; 2 * n];
        match lp.solve(tol) {
            LpOutcome::Optimal { x, .. } => Some((0..n).map(|i| c[i] + x[i] - x[n + i]).collect()),
            _ => None,
        }
    }

    /// Maximizes the minimum slack of the unit-normalized inequalities,
    /// subject to the equalities and the box. Returns the optimizer and the
    /// optimal normalized slack; the box center when there are no
    /// inequalities.
    pub fn max_margin(&self, tol: f64) -> Option<(Vec<f64>, f64)> {
        let n = self.dim;
        let mut rows = Vec::with_capacity(self.inequalities.len());
        for (c, r) in &self.inequalities {
            let len = linalg::norm(c);
            if len <= 1e-300 {
                // 0 ≤ r: either vacuous or infeasible.
                if *r < -tol {
                    return None;
                }
                continue;
            }
            rows.push((linalg::scale(c, 1.0 / len), r / len));
        }
        if rows.is_empty() {
            let center: Vec<f64> = self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect();
            if self.equalities.is_empty() {
                return Some((center, f64::INFINITY));
            }
            let f = self.feasibility(tol);
            return f.point.map(|p| (p.coords, f64::INFINITY));
        }
        let corner = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l.abs().max(u.abs()).powi(2))
            .sum::<f64>()
            .sqrt();
        let bound = rows.iter().map(|(_, r)| r.abs()).fold(0.0, f64::max) + corner + 1.0;

        let mut lp = LinearProgram::new(n + 1);
        lp.objective[n] = -1.0;
        lp.equalities = self
            .equalities
            .iter()
            .map(|(c, r)| {
                let mut c = c.clone();
                c.push(0.0);
                (c, *r)
            })
            .collect();
        lp.inequalities = rows
            .into_iter()
            .map(|(mut c, r)| {
                c.push(1.0);
                (c, r)
            })
            .collect();
        lp.lower = self.lower.clone();
        lp.lower.push(-bound);
        lp.upper = self.upper.clone();
        lp.upper.push(bound);
        match lp.solve(tol) {
            LpOutcome::Optimal { mut x, .. } => {
                let s = x.pop().expect("auxiliary variable");
                Some((self.polish(x), s))
            }
            _ => None,
        }
    }
}

/// Decides whether `sigma` has a weak or strong witness, returning one in
/// the default box when there is one there.
pub fn witness_exists(sigma: &Simplex, sites: &[Point], g: &Geometry, mode: WitnessMode) -> Result<FeasibilityResult> {
    witness_exists_with(sigma, sites, g, mode, &OracleConfig::default())
}

pub fn witness_exists_with(
    sigma: &Simplex,
    sites: &[Point],
    g: &Geometry,
    mode: WitnessMode,
    cfg: &OracleConfig,
) -> Result<FeasibilityResult> {
    let sys = LinearSystem::witness(g, sigma, sites, mode, cfg.box_inflation)?;
    Ok(sys.feasibility(cfg.feasibility_tolerance))
}

/// Witness existence restricted to an explicit box.
pub fn witness_exists_in_box(
    sigma: &Simplex,
    sites: &[Point],
    g: &Geometry,
    mode: WitnessMode,
    lower: Vec<f64>,
    upper: Vec<f64>,
) -> Result<FeasibilityResult> {
    let sys = LinearSystem::witness_in_box(g, sigma, sites, mode, lower, upper)?;
    Ok(sys.feasibility_in_box(FEASIBILITY_TOLERANCE))
}

/// Weak witness maximizing the smallest normalized slack. Reported
/// infeasible when that slack is not above the feasibility tolerance.
pub fn max_margin_witness(sigma: &Simplex, sites: &[Point], g: &Geometry) -> Result<FeasibilityResult> {
    max_margin_witness_with(sigma, sites, g, &OracleConfig::default())
}

pub fn max_margin_witness_with(
    sigma: &Simplex,
    sites: &[Point],
    g: &Geometry,
    cfg: &OracleConfig,
) -> Result<FeasibilityResult> {
    let sys = LinearSystem::witness(g, sigma, sites, WitnessMode::Weak, cfg.box_inflation)?;
    Ok(match sys.max_margin(cfg.feasibility_tolerance) {
        Some((x, s)) if s > cfg.feasibility_tolerance => FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            point: Some(Point::new(x)),
            margin: s,
        },
        _ => FeasibilityResult::infeasible(),
    })
}

/// Center and radius of the sphere through `points` whose center lies in
/// their affine hull.
pub fn circumsphere(points: &[Point]) -> Result<(Point, f64)> {
    let Some(first) = points.first() else {
        return Err(Error::DegenerateInput("no points".into()));
    };
    let dim = first.dim();
    if points.iter().any(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: points.iter().map(Point::dim).find(|&d| d != dim).unwrap_or(dim),
        });
    }
    let k = points.len() - 1;
    if k > dim {
        return Err(Error::DegenerateInput(format!("{} points in dimension {dim}", points.len())));
    }
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| linalg::sub(&p.coords, &first.coords)).collect();
    let scale = diffs.iter().map(|d| linalg::norm(d)).fold(0.0, f64::max).max(1e-300);
    let unit: Vec<Vec<f64>> = diffs.iter().map(|d| linalg::scale(d, 1.0 / scale)).collect();
    if linalg::rank(&unit, dim, 1e-9) < k {
        return Err(Error::DegenerateInput("points are affinely dependent".into()));
    }
    if k == 0 {
        return Ok((first.clone(), 0.0));
    }
    // center = a_0 + Σ λ_j d_j with ⟨d_i, center − a_0⟩ = |d_i|²/2.
    let gram: Vec<Vec<f64>> = diffs.iter().map(|di| diffs.iter().map(|dj| linalg::dot(di, dj)).collect()).collect();
    let rhs: Vec<f64> = diffs.iter().map(|d| 0.5 * linalg::norm_sq(d)).collect();
    let lambda = linalg::solve(&gram, &rhs).ok_or_else(|| Error::DegenerateInput("singular Gram matrix".into()))?;
    let mut c = first.coords.clone();
    for (l, d) in lambda.iter().zip(&diffs) {
        c = linalg::axpy(&c, *l, d);
    }
    let r = linalg::dist(&c, &first.coords);
    Ok((Point::new(c), r))
}

/// Convex weights expressing `x` over `vertices` and the residual
/// `|Σ λ_i v_i − x|`, or `None` when `x` is not in the hull within `tol`.
pub fn convex_hull_coordinates(x: &[f64], vertices: &[Vec<f64>], tol: f64) -> Option<(Vec<f64>, f64)> {
    let m = vertices.len();
    let dim = x.len();
    let mut lp = LinearProgram::new(m);
    for k in 0..dim {
        lp.equalities.push((vertices.iter().map(|v| v[k]).collect(), x[k]));
    }
    lp.equalities.push((vec![1.0; m], 1.0));
    lp.lower = vec![0.0; m];
    lp.upper = vec![1.0; m];
    match lp.solve(tol) {
        LpOutcome::Optimal { x: lambda, .. } => {
            let mut p = vec![0.0; dim];
            for (l, v) in lambda.iter().zip(vertices) {
                p = linalg::axpy(&p, *l, v);
            }
            let resid = linalg::dist(&p, x).max((lambda.iter().sum::<f64>() - 1.0).abs());
            (resid <= tol).then_some((lambda, resid))
        }
        _ => None,
    }
}

/// Weak witnesses for every face of `sigma`, preferring max-margin interior
/// points. `None` when some face has no weak witness in the box.
pub fn witness_family(sigma: &Simplex, sites: &[Point], g: &Geometry) -> Result<Option<WitnessFamily>> {
    let mut family = WitnessFamily::new(sigma.clone());
    for face in sigma.faces() {
        let mm = max_margin_witness(&face, sites, g)?;
        let point = match mm.point {
            Some(p) => p,
            None => match witness_exists(&face, sites, g, WitnessMode::Weak)?.point {
                Some(p) => p,
                None => return Ok(None),
            },
        };
        family.insert(face, point)?;
    }
    Ok(Some(family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{is_strong_witness, is_weak_witness};

    fn quad() -> Vec<Point> {
        vec![
            Point::from([0.0, 0.0]),
            Point::from([1.0, 0.0]),
            Point::from([1.0, 1.0]),
            Point::from([0.0, 0.9]),
        ]
    }

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn noncyclic_quad_has_one_diagonal() {
        let g = Geometry::euclidean(2);
        let a = quad();
        let ac = witness_exists(&s(&[0, 2]), &a, &g, WitnessMode::Weak).unwrap();
        let bd = witness_exists(&s(&[1, 3]), &a, &g, WitnessMode::Weak).unwrap();
        assert_ne!(ac.is_feasible(), bd.is_feasible());
        // d is pulled in, so the b–d diagonal wins.
        assert!(bd.is_feasible());
        assert!(is_weak_witness(&g, bd.point.as_ref().unwrap(), &s(&[1, 3]), &a).is_ok());
    }

    #[test]
    fn strong_triangle_at_circumcenter() {
        let g = Geometry::euclidean(2);
        let a = vec![Point::from([0.0, 0.0]), Point::from([2.0, 0.0]), Point::from([0.0, 2.0])];
        let r = witness_exists(&s(&[0, 1, 2]), &a, &g, WitnessMode::Strong).unwrap();
        let x = r.point.unwrap();
        assert!((x.coords[0] - 1.0).abs() < 1e-12 && (x.coords[1] - 1.0).abs() < 1e-12);
        assert!(is_strong_witness(&g, &x, &s(&[0, 1, 2]), &a).is_ok());
        assert_eq!(r.margin, f64::INFINITY);
    }

    #[test]
    fn full_simplex_weak_feasible() {
        let g = Geometry::euclidean(2);
        assert!(witness_exists(&s(&[0, 1, 2, 3]), &quad(), &g, WitnessMode::Weak).unwrap().is_feasible());
    }

    #[test]
    fn max_margin_edge_on_axis() {
        let g = Geometry::euclidean(2);
        let a = vec![Point::from([0.0, 0.0]), Point::from([2.0, 0.0])];
        let r = max_margin_witness(&s(&[0, 1]), &a, &g).unwrap();
        let x = r.point.unwrap();
        assert!((x.coords[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.margin, f64::INFINITY);
    }

    #[test]
    fn max_margin_vertex_is_interior() {
        let g = Geometry::euclidean(2);
        let a = vec![Point::from([0.0, 0.0]), Point::from([2.0, 0.0])];
        let r = max_margin_witness(&s(&[0]), &a, &g).unwrap();
        assert!(r.margin > 1.0);
        assert!(is_weak_witness(&g, r.point.as_ref().unwrap(), &s(&[0]), &a).unwrap().min_margin() > 0.0);
    }

    #[test]
    fn max_margin_feasible_diagonal_positive() {
        let g = Geometry::euclidean(2);
        let r = max_margin_witness(&s(&[1, 3]), &quad(), &g).unwrap();
        assert!(r.margin > 0.0);
        let cert = is_weak_witness(&g, r.point.as_ref().unwrap(), &s(&[1, 3]), &quad()).unwrap();
        assert!(cert.min_margin() > 0.0);
    }

    #[test]
    fn weighted_vertex_can_lose_its_cell() {
        // A heavy site inside the hull of light ones has an empty power cell.
        let g = Geometry::weighted(1);
        let a = vec![Point::weighted(vec![0.0], 0.0), Point::weighted(vec![1.0], 2.0), Point::weighted(vec![2.0], 0.0)];
        assert!(!witness_exists(&s(&[1]), &a, &g, WitnessMode::Weak).unwrap().is_feasible());
        assert!(witness_exists(&s(&[0, 2]), &a, &g, WitnessMode::Strong).unwrap().is_feasible());
    }

    #[test]
    fn circumsphere_examples() {
        let (c, r) = circumsphere(&[Point::from([0.0, 0.0]), Point::from([2.0, 0.0]), Point::from([0.0, 2.0])]).unwrap();
        assert!((c.coords[0] - 1.0).abs() < 1e-14 && (c.coords[1] - 1.0).abs() < 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let (c, r) = circumsphere(&[Point::from([0.0, 0.0]), Point::from([1.0, 0.0])]).unwrap();
        assert_eq!(c.coords, vec![0.5, 0.0]);
        assert_eq!(r, 0.5);
        assert!(matches!(
            circumsphere(&[Point::from([0.0, 0.0]), Point::from([1.0, 0.0]), Point::from([2.0, 0.0])]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn hull_coordinates() {
        let v = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let (l, res) = convex_hull_coordinates(&[0.25, 0.25], &v, 1e-10).unwrap();
        assert!(res < 1e-12);
        assert!((l[0] - 0.5).abs() < 1e-12);
        assert!(convex_hull_coordinates(&[1.0, 1.0], &v, 1e-10).is_none());
    }

    #[test]
    fn rejects_nonlinear_geometry() {
        let g = Geometry::sphere(2);
        let a = vec![Point::from([1.0, 0.0, 0.0])];
        assert!(matches!(
            witness_exists(&s(&[0]), &a, &g, WitnessMode::Weak),
            Err(Error::UnsupportedGeometry(_))
        ));
    }
}
