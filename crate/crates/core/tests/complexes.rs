use itertools::Itertools;
use witnesskit::complexes::{delaunay_strong_with, delaunay_weak_with, DelaunayOptions, SamplingOptions};
use witnesskit::lp::witness_exists;
use witnesskit::sampling;
use witnesskit::{
    delaunay_strong, delaunay_weak, is_strong_witness, maxmin_landmarks, sphere_generic, witness_complex, Geometry,
    Point, Simplex, WitnessMode,
};

fn random_sites(g: &Geometry, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = sampling::rng(seed);
    (0..n).map(|_| sampling::random_point(g, &mut rng)).collect()
}

#[test]
fn weak_and_strong_agree_euclidean() {
    for t in 0..500u64 {
        let dim = 2 + (t % 2) as usize;
        let n = 3 + (t as usize / 2) % 6;
        let g = Geometry::euclidean(dim);
        let sites = random_sites(&g, n, sampling::sub_seed(31, t));
        let weak = delaunay_weak(&sites, &g, n - 1).unwrap();
        let strong = delaunay_strong(&sites, &g, n - 1).unwrap();
        assert!(weak.same_simplices(&strong), "trial {t}: {:?}", weak.symmetric_difference(&strong));
        assert!(weak.is_face_closed() && strong.is_face_closed());
    }
}

#[test]
fn weak_and_strong_agree_weighted() {
    let mut hidden = 0;
    for t in 0..200u64 {
        let n = 4 + (t as usize) % 5;
        let g = Geometry::weighted(2);
        let sites = random_sites(&g, n, sampling::sub_seed(32, t));
        let weak = delaunay_weak(&sites, &g, n - 1).unwrap();
        let strong = delaunay_strong(&sites, &g, n - 1).unwrap();
        assert!(weak.same_simplices(&strong), "trial {t}");
        hidden += (0..n).filter(|&v| !weak.contains(&Simplex::vertex(v))).count();
    }
    // Some sites have an empty power cell; they must be absent from both.
    assert!(hidden > 0);
}

#[test]
fn oracle_strong_iff_all_faces_weak() {
    for t in 0..100u64 {
        let g = if t % 2 == 0 { Geometry::euclidean(2) } else { Geometry::weighted(2) };
        let sites = random_sites(&g, 6, sampling::sub_seed(33, t));
        for k in 1..=4 {
            for v in (0..6).combinations(k) {
                let sigma = Simplex::new(v).unwrap();
                let strong = witness_exists(&sigma, &sites, &g, WitnessMode::Strong).unwrap().is_feasible();
                let all_weak = sigma
                    .faces()
                    .iter()
                    .all(|f| witness_exists(f, &sites, &g, WitnessMode::Weak).unwrap().is_feasible());
                assert_eq!(strong, all_weak, "trial {t}: {sigma}");
            }
        }
    }
}

#[test]
fn certificates_recertify() {
    let opts = DelaunayOptions {
        certificates: true,
        ..DelaunayOptions::default()
    };
    for (t, g) in [Geometry::euclidean(2), Geometry::weighted(3), Geometry::hyperbolic_ball(2)].into_iter().enumerate() {
        let sites = random_sites(&g, 6, sampling::sub_seed(34, t as u64));
        let c = delaunay_strong_with(&sites, &g, g.dim, &opts).unwrap();
        assert_eq!(c.certificates().len(), c.len());
        let gc = g.with_tolerance(g.certify_tolerance);
        for (sigma, cert) in c.certificates() {
            assert!(is_strong_witness(&gc, &cert.point, sigma, &sites).is_ok(), "{} {sigma}", g.kind);
        }
    }
}

#[test]
fn sphere_skeleton_matches_on_generic_sets() {
    let g = Geometry::sphere(2);
    let opts = DelaunayOptions {
        sampling: SamplingOptions {
            resolutions: vec![20_000],
            ..SamplingOptions::default()
        },
        ..DelaunayOptions::default()
    };
    for t in 0..8u64 {
        let sites = random_sites(&g, 5 + (t % 2) as usize, sampling::sub_seed(35, t));
        assert!(sphere_generic(&sites, 1e-9).generic);
        let n = sites.len();
        let weak = delaunay_weak_with(&sites, &g, n - 1, &opts).unwrap();
        let strong = delaunay_strong_with(&sites, &g, n - 1, &opts).unwrap();
        assert!(weak.skeleton(2).same_simplices(&strong), "trial {t}");
        assert!(strong.dimension().unwrap() <= 2);
    }
}

#[test]
fn hyperbolic_weak_and_strong_agree() {
    let g = Geometry::hyperbolic_ball(2);
    for t in 0..4u64 {
        let sites = random_sites(&g, 5, sampling::sub_seed(36, t));
        let weak = delaunay_weak(&sites, &g, 2).unwrap();
        let strong = delaunay_strong(&sites, &g, 2).unwrap();
        assert!(weak.same_simplices(&strong), "trial {t}: {:?}", weak.symmetric_difference(&strong));
    }
}

#[test]
fn witness_complex_is_monotone_in_max_dim() {
    let g = Geometry::euclidean(2);
    for t in 0..10u64 {
        let sites = random_sites(&g, 60, sampling::sub_seed(37, t));
        let l = maxmin_landmarks(&sites, &g, 8, t).unwrap();
        for d in 0..3 {
            let lo = witness_complex(&l, &sites, &g, d).unwrap();
            let hi = witness_complex(&l, &sites, &g, d + 1).unwrap();
            assert!(hi.skeleton(d).same_simplices(&lo), "trial {t}, d = {d}");
            assert!(hi.is_face_closed());
        }
    }
}

#[test]
fn circle_samples_give_a_cycle() {
    let g = Geometry::euclidean(2);
    let sites: Vec<Point> = (0..40)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 40.0;
            Point::from([t.cos(), t.sin()])
        })
        .collect();
    let l = maxmin_landmarks(&sites, &g, 8, 0).unwrap();
    let c = witness_complex(&l, &sites, &g, 1).unwrap();
    assert_eq!(c.f_vector(), vec![8, 8]);
    assert_eq!(c.connected_components(), 1);
    assert_eq!(c.graph_cycle_rank(), 1);
}
