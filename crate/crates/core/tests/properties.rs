use johnkit::certificate::{min_random_contacts, random_certified_body, verify};
use johnkit::kflat::{
    kellipsoid_margin, max_kball_in_subspace, projection_norm_sum, projection_sum_lower_bound, r_max,
    search_max_kball, DegenerateEllipsoid, InequalityChain, SearchConfig,
};
use johnkit::linalg::{dot, eig_sym, norm, orthonormalize, SymMatrix, Vector};
use johnkit::mvie::solve_mvie;
use johnkit::polytope::{cube, regular_simplex, HalfspacePolytope};
use johnkit::report::all_pass;
use johnkit::rng::{gaussian_vector, random_frame, rng_for, unit_vector};
use johnkit::Tolerances;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orthonormalize_gives_orthonormal_span(seed: u64, n in 2usize..7, k in 1usize..7) {
        let k = k.min(n);
        let mut rng = rng_for(seed, 0);
        let cols: Vec<Vector> = (0..k).map(|_| gaussian_vector(&mut rng, n)).collect();
        let f = orthonormalize(&cols).unwrap();
        prop_assert!(f.orthonormality_error() <= 1e-12);
        for c in &cols {
            prop_assert!((norm(&f.project(c)) - norm(c)).abs() <= 1e-10 * norm(c));
        }
    }

    #[test]
    fn eig_reconstructs(seed: u64, n in 1usize..7) {
        let mut rng = rng_for(seed, 1);
        let vs: Vec<Vector> = (0..n + 1).map(|_| gaussian_vector(&mut rng, n)).collect();
        let m = SymMatrix::weighted_outer_sum(&vs, &vec![1.0; vs.len()], n);
        let (vals, frame) = eig_sym(&m).unwrap();
        for w in vals.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let x = gaussian_vector(&mut rng, n);
        let mx = m.matvec(&x);
        let scaled: Vector = frame.coords(&x).iter().zip(&vals).map(|(c, l)| c * l).collect();
        let rec = frame.combine(&scaled);
        let err = mx.iter().zip(&rec).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10 * (1.0 + m.frobenius() * norm(&x)));
    }

    #[test]
    fn simplex_kball_lp_is_tight(seed: u64, n in 2usize..6, k in 1usize..6) {
        let k = k.min(n - 1);
        let t = regular_simplex(n).unwrap();
        let frame = random_frame(&mut rng_for(seed, 2), n, k);
        let (y, r) = max_kball_in_subspace(&t, &frame).unwrap();
        prop_assert!(r <= r_max(n, k).unwrap() + 1e-9);
        let e = DegenerateEllipsoid::ball(y, frame.clone(), r).unwrap();
        let margins = kellipsoid_margin(&t, &e);
        prop_assert!(margins.iter().all(|m| *m >= -1e-9));
        prop_assert!(margins.iter().filter(|m| m.abs() <= 1e-8).count() > k);
        let normals: Vec<Vector> = t.normals().cloned().collect();
        prop_assert!(projection_norm_sum(&normals, &frame) >= projection_sum_lower_bound(n, k) - 1e-9);
    }

    #[test]
    fn kellipsoid_margin_matches_boundary_samples(seed: u64, n in 2usize..5, k in 1usize..5) {
        let k = k.min(n);
        let mut rng = rng_for(seed, 3);
        let c = cube(n).unwrap();
        let frame = random_frame(&mut rng, n, k);
        let axes: Vector = (0..k).map(|j| 0.2 + 0.1 * j as f64).collect();
        let y = johnkit::linalg::scale(&gaussian_vector(&mut rng, n), 0.1);
        let e = DegenerateEllipsoid::new(y.clone(), frame.clone(), axes.clone()).unwrap();
        let margins = kellipsoid_margin(&c, &e);
        for (row, m) in c.polytope().rows().iter().zip(&margins) {
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..200 {
                let t = unit_vector(&mut rng, k);
                let scaled: Vector = t.iter().zip(&axes).map(|(a, b)| a * b).collect();
                let x = johnkit::linalg::add(&y, &frame.combine(&scaled));
                worst = worst.max(dot(&row.a, &x));
            }
            prop_assert!(worst <= row.b - m + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_certified_bodies_have_unit_mvie(seed: u64, n in 2usize..5) {
        let tol = Tolerances::default();
        let mut rng = rng_for(seed, 4);
        if let Some((body, cert)) = random_certified_body(&mut rng, n, 3 * min_random_contacts(n), &tol) {
            prop_assert!(all_pass(&verify(&cert, 1e-9)));
            let w: f64 = cert.weights.iter().sum();
            prop_assert!((w - n as f64).abs() <= 1e-9);
            let e = solve_mvie(body.polytope()).unwrap();
            prop_assert!(norm(&e.center) <= 1e-6);
            for a in &e.semi_axes {
                prop_assert!((a - 1.0).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn chain_holds_for_inscribed_kellipsoids(seed: u64, n in 2usize..6, k in 1usize..6) {
        let k = k.min(n);
        let tol = Tolerances::default();
        let mut rng = rng_for(seed, 5);
        let Some((body, cert)) = random_certified_body(&mut rng, n, 3 * min_random_contacts(n), &tol) else {
            return Ok(());
        };
        let frame = random_frame(&mut rng, n, k);
        let y = johnkit::linalg::scale(&unit_vector(&mut rng, n), 0.3);
        let axes: Vector = (0..k).map(|_| 0.5 + rand::Rng::random::<f64>(&mut rng)).collect();
        let e = DegenerateEllipsoid::new(y, frame, axes).unwrap();
        let chain = InequalityChain::compute(&cert, &e);
        prop_assert!(chain.identity_error() <= 1e-9);
        // shrink until inscribed; the chain must then hold
        let mut s = 1.0;
        while kellipsoid_margin(&body, &e.scaled(s)).iter().any(|m| *m < 0.0) {
            s *= 0.8;
        }
        let chain = InequalityChain::compute(&cert, &e.scaled(s));
        prop_assert!(chain.sum_sq_slack() >= -1e-7);
        prop_assert!(chain.sum_slack() >= -1e-6);
        prop_assert!(chain.cauchy_schwarz_slack() >= -1e-12);
    }
}

#[test]
fn search_is_monotone_in_restarts() {
    let t = regular_simplex(4).unwrap();
    let mut last = f64::NEG_INFINITY;
    for restarts in [1, 2, 4, 8] {
        let cfg = SearchConfig { restarts, steps: 40, seed: 11, ..SearchConfig::default() };
        let r = search_max_kball(&t, 2, &cfg).unwrap().objective;
        assert!(r >= last, "{restarts}: {r} < {last}");
        last = r;
    }
}

#[test]
fn polytope_json_round_trip_is_idempotent() {
    let p = cube(3).unwrap().into_polytope();
    let s1 = serde_json::to_string(&p).unwrap();
    let q: HalfspacePolytope = serde_json::from_str(&s1).unwrap();
    assert_eq!(s1, serde_json::to_string(&q).unwrap());
}
