use proptest::prelude::*;
use witnesskit::geometry::Stereographic;
use witnesskit::linalg;
use witnesskit::{Geometry, GeometryKind, Point};

fn coords(dim: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, dim)
}

/// Random point of `g` built from raw coordinates.
fn place(g: &Geometry, raw: &[f64], w: f64) -> Option<Point> {
    match g.kind {
        GeometryKind::Euclidean => Some(Point::new(raw[..g.dim].to_vec())),
        GeometryKind::Weighted => Some(Point::weighted(raw[..g.dim].to_vec(), w)),
        GeometryKind::HyperbolicBall => {
            let v = &raw[..g.dim];
            let n = linalg::norm(v);
            Some(Point::new(if n >= 0.95 { linalg::scale(v, 0.95 / n) } else { v.to_vec() }))
        }
        GeometryKind::Sphere => linalg::normalize(&raw[..=g.dim]).map(Point::new),
        GeometryKind::Hemisphere => {
            let mut v = raw[..=g.dim].to_vec();
            v[0] = v[0].abs() + 0.05;
            linalg::normalize(&v).map(Point::new)
        }
    }
}

fn geometry(kind: usize, dim: usize) -> Geometry {
    match kind {
        0 => Geometry::euclidean(dim),
        1 => Geometry::weighted(dim),
        2 => Geometry::hyperbolic_ball(dim),
        3 => Geometry::hemisphere(dim),
        _ => Geometry::sphere(dim),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn distances_form_a_metric(kind in 0usize..5, dim in 2usize..4, x in coords(4, 1.0), y in coords(4, 1.0), z in coords(4, 1.0)) {
        // Power distance is not a metric; skip it here.
        prop_assume!(kind != 1);
        let g = geometry(kind, dim);
        let (Some(x), Some(y), Some(z)) = (place(&g, &x, 0.0), place(&g, &y, 0.0), place(&g, &z, 0.0)) else {
            return Ok(());
        };
        let dxy = g.distance(&x, &y).unwrap();
        let dyx = g.distance(&y, &x).unwrap();
        let dxz = g.distance(&x, &z).unwrap();
        let dzy = g.distance(&z, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - dyx).abs() <= 1e-12 * (1.0 + dxy));
        prop_assert!(dxy <= dxz + dzy + 1e-9 * (1.0 + dxy));
        prop_assert!(g.distance(&x, &x).unwrap() <= 1e-7);
    }

    #[test]
    fn margin_is_antisymmetric(kind in 0usize..5, x in coords(4, 1.0), a in coords(4, 1.0), b in coords(4, 1.0), wa in 0.0..1.0f64, wb in 0.0..1.0f64) {
        let g = geometry(kind, 2);
        let (Some(x), Some(a), Some(b)) = (place(&g, &x, 0.0), place(&g, &a, wa), place(&g, &b, wb)) else {
            return Ok(());
        };
        let m_ab = g.closer_margin(&x, &a, &b).unwrap();
        let m_ba = g.closer_margin(&x, &b, &a).unwrap();
        prop_assert!((m_ab + m_ba).abs() <= 1e-12 * (1.0 + m_ab.abs()));
        prop_assert_eq!(g.in_region(&x, &a, &b), m_ab >= -g.tolerance);
    }

    #[test]
    fn bisector_crossing_lies_on_bisector_and_geodesic(kind in 0usize..4, dim in 2usize..4, a in coords(4, 1.0), b in coords(4, 1.0)) {
        let g = geometry(kind, dim);
        let (Some(a), Some(b)) = (place(&g, &a, 0.1), place(&g, &b, 0.4)) else {
            return Ok(());
        };
        prop_assume!(g.distance(&a, &b).unwrap() > 1e-3);
        let x = a.clone();
        let y = b.clone();
        prop_assume!(g.closer_margin(&x, &a, &b).unwrap() > 1e-6 && g.closer_margin(&y, &b, &a).unwrap() > 1e-6);
        let z = g.bisector_crossing(&x, &y, &a, &b).unwrap();
        let m = g.closer_margin(&z, &a, &b).unwrap();
        prop_assert!(m.abs() <= 1e-8, "margin {m}");
        // z is on the geodesic: d(x, z) + d(z, y) = d(x, y).
        let dxy = g.distance(&x, &y).unwrap();
        let via = g.distance(&x, &z).unwrap() + g.distance(&z, &y).unwrap();
        if kind != 1 {
            prop_assert!((via - dxy).abs() <= 1e-7 * (1.0 + dxy), "{via} vs {dxy}");
        }
    }

    #[test]
    fn geodesic_endpoints(kind in 0usize..5, a in coords(4, 1.0), b in coords(4, 1.0)) {
        let g = geometry(kind, 3);
        let (Some(a), Some(b)) = (place(&g, &a, 0.0), place(&g, &b, 0.0)) else {
            return Ok(());
        };
        prop_assume!(!g.antipodal(&a, &b));
        let p0 = g.geodesic_point(&a, &b, 0.0).unwrap();
        let p1 = g.geodesic_point(&a, &b, 1.0).unwrap();
        prop_assert!(linalg::dist(&p0.coords, &a.coords) <= 1e-9);
        prop_assert!(linalg::dist(&p1.coords, &b.coords) <= 1e-9);
    }

    #[test]
    fn stereographic_round_trip(dim in 2usize..5, pole in coords(5, 1.0), x in coords(5, 1.0)) {
        let (Some(s), Some(x)) = (linalg::normalize(&pole[..=dim]), linalg::normalize(&x[..=dim])) else {
            return Ok(());
        };
        prop_assume!(linalg::dist(&s, &x) > 1e-2);
        let proj = Stereographic::new(&Point::new(s)).unwrap();
        let u = proj.project(&Point::new(x.clone())).unwrap();
        let back = proj.lift(&u).unwrap();
        prop_assert!(linalg::dist(&back.coords, &x) <= 1e-9);
    }

    #[test]
    fn stereographic_maps_balls_to_balls(pole in coords(3, 1.0), c in coords(3, 1.0), r in 0.05..1.0f64, q in coords(3, 1.0), t in 0.0..1.0f64) {
        let (Some(s), Some(c), Some(q)) = (linalg::normalize(&pole), linalg::normalize(&c), linalg::normalize(&q)) else {
            return Ok(());
        };
        let g = Geometry::sphere(2);
        let ball = witnesskit::MetricBall::new(Point::new(c), r);
        let sp = Point::new(s);
        prop_assume!(g.distance(&sp, &ball.center).unwrap() > r + 1e-3);
        let q = Point::new(q);
        let dq = g.distance(&ball.center, &q).unwrap();
        prop_assume!(dq >= r && !g.antipodal(&ball.center, &q));
        let proj = Stereographic::new(&sp).unwrap();
        let image = proj.ball_image(&ball).unwrap();
        // A point of the ball at distance t·r from its center.
        let x = g.geodesic_point(&ball.center, &q, t * r / dq).unwrap();
        let u = proj.project(&x).unwrap();
        prop_assert!(linalg::dist(&u.coords, &image.center.coords) <= image.radius * (1.0 + 1e-9) + 1e-9);
        let back = proj.ball_preimage(&image).unwrap();
        prop_assert!(g.distance(&back.center, &ball.center).unwrap() <= 1e-7);
        prop_assert!((back.radius - r).abs() <= 1e-9);
    }
}
