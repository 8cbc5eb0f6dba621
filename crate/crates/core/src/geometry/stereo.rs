//! Stereographic projection of `S^n` minus a pole onto the hyperplane
//! through the origin perpendicular to the pole.

use super::{sphere_distance, MetricBall, Point};
use crate::error::{Error, Result};
use crate::linalg;

/// Projection from a fixed pole `s`, with a fixed orthonormal basis of the
/// target hyperplane `V = s^⊥` used to express images in `R^n`.
#[derive(Debug, Clone)]
pub struct Stereographic {
    pole: Vec<f64>,
    basis: Vec<Vec<f64>>,
    tolerance: f64,
}

impl Stereographic {
    pub fn new(pole: &Point) -> Result<Self> {
        let r = linalg::norm(&pole.coords);
        if pole.dim() < 2 || (r - 1.0).abs() > super::UNIT_NORM_TOLERANCE {
            return Err(Error::InvalidPoint {
                geometry: "sphere",
                reason: format!("pole must be a unit vector in R^(n+1), n >= 1 (norm {r})"),
            });
        }
        Ok(Stereographic {
            pole: pole.coords.clone(),
            basis: linalg::orthogonal_complement(&pole.coords),
            tolerance: 1e-12,
        })
    }

    pub fn pole(&self) -> Point {
        Point::new(self.pole.clone())
    }

    /// Coordinates in `V` of a vector lying in `V`.
    fn to_plane(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| linalg::dot(b, v)).collect()
    }

    fn plane_to_ambient(&self, u: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.pole.len()];
        for (b, &c) in self.basis.iter().zip(u) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += c * bi;
            }
        }
        v
    }

    pub fn project(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.pole.len() {
            return Err(Error::DimensionMismatch {
                expected: self.pole.len(),
                found: x.dim(),
            });
        }
        let denom = 1.0 - linalg::dot(&x.coords, &self.pole);
        if denom <= self.tolerance {
            return Err(Error::PoleProjection);
        }
        // s + (x - s) / (1 - <x, s>) lies in V.
        let p = linalg::axpy(&self.pole, 1.0 / denom, &linalg::sub(&x.coords, &self.pole));
        Ok(Point::new(self.to_plane(&p)))
    }

    /// Inverse of [`Stereographic::project`].
    pub fn lift(&self, u: &Point) -> Result<Point> {
        if u.dim() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                found: u.dim(),
            });
        }
        let p = self.plane_to_ambient(&u.coords);
        let tau = 2.0 / (linalg::norm_sq(&u.coords) + 1.0);
        let x = linalg::axpy(&self.pole, tau, &linalg::sub(&p, &self.pole));
        Ok(Point::new(linalg::normalize(&x).unwrap_or(x)))
    }

    /// Unit vector `u ⟂ s` spanning, with `s`, the plane through `c`.
    fn axis_towards(&self, c: &[f64]) -> Vec<f64> {
        let along = linalg::dot(c, &self.pole);
        linalg::normalize(&linalg::axpy(c, -along, &self.pole)).unwrap_or_else(|| self.basis[0].clone())
    }

    /// Image of a closed metric ball of `S^n` not containing the pole: the
    /// Euclidean ball in `V` whose diameter joins the images of the two
    /// boundary points in the plane spanned by the pole and the center.
    pub fn ball_image(&self, ball: &MetricBall) -> Result<MetricBall> {
        let c = &ball.center.coords;
        if sphere_distance(c, &self.pole) <= ball.radius {
            return Err(Error::PoleInBall);
        }
        let u = self.axis_towards(c);
        let theta_c = linalg::dot(c, &u).atan2(linalg::dot(c, &self.pole));
        // Angle theta from the pole in the (s, u) plane projects to cot(theta / 2) u.
        let cot_half = |theta: f64| (theta / 2.0).cos() / (theta / 2.0).sin();
        let p1 = cot_half(theta_c - ball.radius);
        let p2 = cot_half(theta_c + ball.radius);
        let center = linalg::scale(&u, 0.5 * (p1 + p2));
        Ok(MetricBall::new(
            Point::new(self.to_plane(&center)),
            0.5 * (p1 - p2).abs(),
        ))
    }

    /// Metric ball of `S^n` whose image is the given Euclidean ball in `V`.
    pub fn ball_preimage(&self, ball: &MetricBall) -> Result<MetricBall> {
        if ball.center.dim() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                found: ball.center.dim(),
            });
        }
        let c = self.plane_to_ambient(&ball.center.coords);
        let r0 = linalg::norm(&c);
        let u = if r0 > 0.0 { linalg::scale(&c, 1.0 / r0) } else { self.basis[0].clone() };
        // Scalar position q along u corresponds to angle 2 atan2(1, q) from the pole.
        let angle = |q: f64| 2.0 * 1f64.atan2(q);
        let t1 = angle(r0 - ball.radius);
        let t2 = angle(r0 + ball.radius);
        let tc = 0.5 * (t1 + t2);
        let center = linalg::add(&linalg::scale(&self.pole, tc.cos()), &linalg::scale(&u, tc.sin()));
        Ok(MetricBall::new(
            Point::new(linalg::normalize(&center).unwrap_or(center)),
            0.5 * (t1 - t2).abs(),
        ))
    }
}

/// Projects `x` from the pole `s` onto `s^⊥ ≅ R^n`.
pub fn stereographic_project(s: &Point, x: &Point) -> Result<Point> {
    Stereographic::new(s)?.project(x)
}

pub fn stereographic_ball_image(s: &Point, ball: &MetricBall) -> Result<MetricBall> {
    Stereographic::new(s)?.ball_image(ball)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn north() -> Point {
        Point::new(vec![0.0, 0.0, 1.0])
    }

    #[test]
    fn antipode_maps_to_origin() {
        let p = stereographic_project(&north(), &Point::new(vec![0.0, 0.0, -1.0])).unwrap();
        assert_eq!(p.coords, vec![0.0, 0.0]);
    }

    #[test]
    fn equator_fixed() {
        let p = stereographic_project(&north(), &Point::new(vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(p.coords, vec![1.0, 0.0]);
    }

    #[test]
    fn pole_refused() {
        assert_eq!(stereographic_project(&north(), &north()).unwrap_err(), Error::PoleProjection);
    }

    #[test]
    fn southern_cap_image() {
        // Boundary point (1/√2, 0, -1/√2) meets the plane at distance
        // (1/√2) / (1 + 1/√2) = √2 - 1 from the origin.
        let cap = MetricBall::new(Point::new(vec![0.0, 0.0, -1.0]), FRAC_PI_4);
        let img = stereographic_ball_image(&north(), &cap).unwrap();
        assert!(img.center.coords.iter().all(|c| c.abs() < 1e-15));
        assert!((img.radius - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let boundary = Point::new(vec![FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2]);
        let q = stereographic_project(&north(), &boundary).unwrap();
        assert!((linalg::norm(&q.coords) - img.radius).abs() < 1e-15);
    }

    #[test]
    fn pole_in_ball_refused() {
        let cap = MetricBall::new(Point::new(vec![1.0, 0.0, 0.0]), PI / 2.0 + 0.1);
        assert_eq!(stereographic_ball_image(&north(), &cap).unwrap_err(), Error::PoleInBall);
    }

    #[test]
    fn preimage_inverts_image() {
        let g = Geometry::sphere(2);
        let st = Stereographic::new(&north()).unwrap();
        let c = g.point(vec![0.6, 0.0, -0.8]).unwrap();
        for r in [0.1, 0.5, 1.2, 2.0] {
            let ball = MetricBall::new(c.clone(), r);
            let back = st.ball_preimage(&st.ball_image(&ball).unwrap()).unwrap();
            assert!(linalg::dist(&back.center.coords, &c.coords) < 1e-12);
            assert!((back.radius - r).abs() < 1e-12);
        }
    }
}
