//! Seeded random and quasi-uniform point generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{Geometry, GeometryKind, Point};
use crate::linalg;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream index so per-trial generators are
/// independent of scheduling order.
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform point on the unit sphere in `R^dim`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        if let Some(v) = linalg::normalize(&gaussian_vec(rng, dim)) {
            return v;
        }
    }
}

/// Uniform point in the Euclidean ball of the given radius.
pub fn in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    let dir = unit_vector(rng, dim);
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    linalg::scale(&dir, r)
}

/// A random valid point for the geometry. Euclidean points are drawn from
/// `[-1, 1]^n`, weights from `[0, 1]`, hyperbolic points from the Euclidean
/// ball of radius `0.95`.
pub fn random_point<R: Rng + ?Sized>(g: &Geometry, rng: &mut R) -> Point {
    match g.kind {
        GeometryKind::Euclidean => Point::new((0..g.dim).map(|_| rng.random_range(-1.0..1.0)).collect()),
        GeometryKind::Weighted => {
            let coords = (0..g.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            Point::weighted(coords, rng.random_range(0.0..1.0))
        }
        GeometryKind::HyperbolicBall => Point::new(in_ball(rng, g.dim, 0.95)),
        GeometryKind::Sphere => Point::new(unit_vector(rng, g.dim + 1)),
        GeometryKind::Hemisphere => {
            let mut v = unit_vector(rng, g.dim + 1);
            if v[0] < 0.0 {
                v[0] = -v[0];
            }
            if v[0] == 0.0 {
                v[0] = f64::MIN_POSITIVE;
                v = linalg::normalize(&v).expect("nonzero");
            }
            Point::new(v)
        }
    }
}

/// Fibonacci lattice of `n` points on `S^2`, rotated by a seeded random
/// rotation so different seeds give different (but equally uniform) sets.
pub fn fibonacci_sphere(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let rot = random_rotation3(&mut rng(seed));
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            let v = [r * phi.cos(), r * phi.sin(), z];
            (0..3).map(|row| linalg::dot(&rot[row], &v)).collect()
        })
        .collect()
}

fn random_rotation3<R: Rng + ?Sized>(rng: &mut R) -> [Vec<f64>; 3] {
    let a = unit_vector(rng, 3);
    let mut b = gaussian_vec(rng, 3);
    let c = linalg::dot(&a, &b);
    b = linalg::normalize(&linalg::axpy(&b, -c, &a)).unwrap_or_else(|| {
        let e = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let c = linalg::dot(&a, &e);
        linalg::normalize(&linalg::axpy(&e, -c, &a)).expect("independent")
    });
    let c = vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    [a, b, c]
}

/// Quasi-uniform sample of `S^dim`: the Fibonacci lattice on `S^2`, seeded
/// uniform draws otherwise.
pub fn sphere_sample(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    if dim == 2 {
        fibonacci_sphere(n, seed)
    } else {
        let mut r = rng(seed);
        (0..n).map(|_| unit_vector(&mut r, dim + 1)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_is_unit_and_deterministic() {
        let a = fibonacci_sphere(1000, 7);
        let b = fibonacci_sphere(1000, 7);
        assert_eq!(a, b);
        for v in &a {
            assert!((linalg::norm(v) - 1.0).abs() < 1e-12);
        }
        let mean_z: f64 = a.iter().map(|v| v[2]).sum::<f64>() / a.len() as f64;
        assert!(mean_z.abs() < 0.05);
    }

    #[test]
    fn random_points_are_valid() {
        let mut r = rng(3);
        for kind in GeometryKind::ALL {
            let g = Geometry::new(kind, 3).unwrap();
            for _ in 0..200 {
                g.validate(&random_point(&g, &mut r)).unwrap();
            }
        }
    }
}
