//! Small dense vector helpers over `f64` slices, plus a few factorizations
//! borrowed from `nalgebra` (rank, null space, least squares).

use nalgebra::{DMatrix, DVector};

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

#[inline]
pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

#[inline]
pub fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

#[inline]
pub fn scale(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|a| a * s).collect()
}

/// `x + s * y`
#[inline]
pub fn axpy(x: &[f64], s: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + s * b).collect()
}

/// `(1 - t) x + t y`
#[inline]
pub fn lerp(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

#[inline]
pub fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    dist_sq(x, y).sqrt()
}

/// Returns `None` for the zero vector.
pub fn normalize(x: &[f64]) -> Option<Vec<f64>> {
    let n = norm(x);
    (n > 0.0 && n.is_finite()).then(|| scale(x, 1.0 / n))
}

fn matrix(rows: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

/// Singular values of the matrix whose rows are `rows`, in decreasing order.
pub fn singular_values(rows: &[Vec<f64>], cols: usize) -> Vec<f64> {
    if rows.is_empty() || cols == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = matrix(rows, cols).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with singular values counted when `> tol * max(1, s_max)`.
pub fn rank(rows: &[Vec<f64>], cols: usize, tol: f64) -> usize {
    let s = singular_values(rows, cols);
    let cutoff = tol * s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&v| v > cutoff).count()
}

/// Orthonormal basis of the null space `{x : rows . x = 0}` in `R^cols`.
pub fn null_space(rows: &[Vec<f64>], cols: usize, tol: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    // Pad to at least `cols` rows so the thin SVD exposes the full right basis.
    let r = rows.len().max(cols);
    let m = DMatrix::from_fn(r, cols, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max().max(1.0);
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol * smax {
            basis.push(vt.row(k).iter().copied().collect());
        }
    }
    basis
}

/// Solves the square system `m x = b`; `None` when singular.
pub fn solve(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let m = matrix(rows, n);
    let b = DVector::from_column_slice(rhs);
    m.lu().solve(&b).map(|x| x.iter().copied().collect())
}

/// Minimum-norm least-squares solution of `m x = b` for an `r x cols` system.
pub fn least_squares(rows: &[Vec<f64>], cols: usize, rhs: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = matrix(rows, cols);
    let b = DVector::from_column_slice(rhs);
    let svd = m.svd(true, true);
    let eps = tol * svd.singular_values.max().max(1.0);
    svd.solve(&b, eps).ok().map(|x| x.iter().copied().collect())
}

/// Orthonormal basis of the hyperplane perpendicular to the unit vector `s`,
/// built by Gram-Schmidt over the standard basis (skipping the axis most
/// aligned with `s`). For `s = e_{n+1}` this yields `e_1, ..., e_n`.
pub fn orthogonal_complement(s: &[f64]) -> Vec<Vec<f64>> {
    let d = s.len();
    let skip = (0..d)
        .max_by(|&i, &j| s[i].abs().total_cmp(&s[j].abs()))
        .unwrap_or(0);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d.saturating_sub(1));
    for i in (0..d).filter(|&i| i != skip) {
        let mut v: Vec<f64> = (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
        let c = dot(&v, s);
        v = axpy(&v, -c, s);
        for b in &basis {
            let c = dot(&v, b);
            v = axpy(&v, -c, b);
        }
        basis.push(normalize(&v).expect("standard basis vector independent of s"));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_plane() {
        let ns = null_space(&[vec![0.0, 0.0, 1.0]], 3, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(v[2].abs() < 1e-12);
            assert!((norm(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_of_pole_is_standard() {
        let b = orthogonal_complement(&[0.0, 0.0, 1.0]);
        assert_eq!(b, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
    }

    #[test]
    fn rank_detects_collinear() {
        let rows = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(rank(&rows, 2, 1e-9), 1);
    }
}
