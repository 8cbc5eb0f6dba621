//! Minimum-norm point of a convex hull (Wolfe's algorithm) and the closest
//! pair between two convex hulls.

use crate::linalg;

const MAX_MAJOR_ITERATIONS: usize = 1000;

/// Minimum-norm point of `conv(points)` with its convex weights.
pub fn min_norm_point(points: &[Vec<f64>], tol: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(!points.is_empty(), "hull of an empty set");
    let dim = points[0].len();
    let scale = points.iter().map(|p| linalg::norm_sq(p)).fold(0.0, f64::max).max(1e-300);

    let start = (0..points.len())
        .min_by(|&i, &j| linalg::norm_sq(&points[i]).total_cmp(&linalg::norm_sq(&points[j])))
        .expect("nonempty");
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let combine = |active: &[usize], lambda: &[f64]| {
        let mut x = vec![0.0; dim];
        for (&i, &l) in active.iter().zip(lambda) {
            for (xk, pk) in x.iter_mut().zip(&points[i]) {
                *xk += l * pk;
            }
        }
        x
    };
    let mut x = points[start].clone();

    for _ in 0..MAX_MAJOR_ITERATIONS {
        let (j, xp) = (0..points.len())
            .map(|i| (i, linalg::dot(&x, &points[i])))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("nonempty");
        if linalg::norm_sq(&x) - xp <= tol * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);

        loop {
            let alpha = match affine_minimizer(points, &active) {
                Some(a) => a,
                None => {
                    active.pop();
                    lambda.pop();
                    break;
                }
            };
            if alpha.iter().all(|&a| a > tol) {
                lambda = alpha;
                break;
            }
            let theta = active
                .iter()
                .enumerate()
                .filter(|&(k, _)| alpha[k] <= tol)
                .map(|(k, _)| lambda[k] / (lambda[k] - alpha[k]))
                .filter(|t| t.is_finite())
                .fold(1.0_f64, f64::min)
                .clamp(0.0, 1.0);
            for k in 0..lambda.len() {
                lambda[k] = theta * alpha[k] + (1.0 - theta) * lambda[k];
            }
            let mut k = 0;
            while k < active.len() {
                if lambda[k] <= tol && active.len() > 1 {
                    active.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        x = combine(&active, &lambda);
    }

    let mut weights = vec![0.0; points.len()];
    for (&i, &l) in active.iter().zip(&lambda) {
        weights[i] = l;
    }
    (x, weights)
}

/// Weights minimizing `|Σ α_i p_i|` subject to `Σ α_i = 1` over the active set.
fn affine_minimizer(points: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let m = active.len();
    let mut rows = vec![vec![0.0; m + 1]; m + 1];
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            rows[r][c] = linalg::dot(&points[i], &points[j]);
        }
        rows[r][m] = 1.0;
        rows[m][r] = 1.0;
    }
    let mut rhs = vec![0.0; m + 1];
    rhs[m] = 1.0;
    let sol = linalg::solve(&rows, &rhs)?;
    sol[..m].iter().all(|v| v.is_finite()).then(|| sol[..m].to_vec())
}

/// Closest points `(p, q)` with `p ∈ conv(a)`, `q ∈ conv(b)`, found as the
/// minimum-norm point of the difference set `{a_i - b_j}`.
pub fn closest_points(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diffs = Vec::with_capacity(a.len() * b.len());
    for ai in a {
        for bj in b {
            diffs.push(linalg::sub(ai, bj));
        }
    }
    let (_, w) = min_norm_point(&diffs, tol);
    let dim = a[0].len();
    let (mut p, mut q) = (vec![0.0; dim], vec![0.0; dim]);
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let l = w[i * b.len() + j];
            if l == 0.0 {
                continue;
            }
            for k in 0..dim {
                p[k] += l * ai[k];
                q[k] += l * bj[k];
            }
        }
    }
    (p, q)
}
