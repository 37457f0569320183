//! Acceptance suite: one pass/fail line per criterion.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use johnkit::certificate::{
    certify_john_form, min_random_contacts, random_certified_body, solve_weights, verify, JohnCertificate,
};
use johnkit::jung::{diameter, jung_equality_witness, jung_radius, lemma5_gap, min_enclosing_ball};
use johnkit::kflat::{
    face_parallel_check, projection_norm_sum, projection_sum_lower_bound, search_max_kball, search_max_kellipsoid,
    InequalityChain, SearchConfig,
};
use johnkit::linalg::{self, norm, Vector};
use johnkit::mvie::solve_mvie;
use johnkit::polytope::{cross_polytope, cube, regular_simplex, JohnFormPolytope};
use johnkit::rng::{gaussian_vector, random_frame, rng_for, unit_vector};
use johnkit::Tolerances;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// `√(n(n+1)/(k(k+1)))`, evaluated independently of the library.
fn prop2_radius(n: usize, k: usize) -> f64 {
    ((n * (n + 1)) as f64 / (k * (k + 1)) as f64).sqrt()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut worst_center: f64 = 0.0;
    let mut worst_axis: f64 = 0.0;
    for n in 2..=8 {
        for body in [cube(n).unwrap(), regular_simplex(n).unwrap()] {
            let e = solve_mvie(body.polytope()).unwrap();
            worst_center = worst_center.max(norm(&e.center));
            for a in &e.semi_axes {
                worst_axis = worst_axis.max((a - 1.0).abs());
            }
        }
    }
    let t = start.elapsed();
    verdict(
        worst_center <= 1e-7 && worst_axis <= 1e-6 && t < Duration::from_secs(5),
        format!("max ‖center‖ {worst_center:.2e}, max |α−1| {worst_axis:.2e}, {t:.2?}"),
    )
}

fn criterion_2() -> Verdict {
    let mut worst_weight: f64 = 0.0;
    let mut worst_resid: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut check = |cert: &JohnCertificate, want: f64, n: usize| {
        for c in &cert.weights {
            worst_weight = worst_weight.max((c - want).abs());
        }
        let reports = verify(cert, 1e-9);
        for r in &reports[..2] {
            worst_resid = worst_resid.max(r.measured);
        }
        let sum: f64 = cert.weights.iter().sum();
        worst_trace = worst_trace.max((sum - n as f64).abs());
    };
    for n in 2..=8 {
        let simplex: Vec<Vector> = regular_simplex(n).unwrap().normals().cloned().collect();
        let cert = solve_weights(&simplex).unwrap();
        let ok_len = cert.len() == n + 1;
        check(&cert, n as f64 / (n as f64 + 1.0), n);
        let cube_contacts: Vec<Vector> = (0..2 * n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                e
            })
            .collect();
        let cert = solve_weights(&cube_contacts).unwrap();
        check(&cert, 0.5, n);
        if !ok_len || cert.len() != 2 * n {
            return verdict(false, format!("n={n}: a contact was dropped"));
        }
    }
    verdict(
        worst_weight <= 1e-9 && worst_resid <= 1e-9 && worst_trace <= 1e-9,
        format!("max weight err {worst_weight:.2e}, max residual {worst_resid:.2e}, max |∑c−n| {worst_trace:.2e}"),
    )
}

fn kball_config() -> SearchConfig {
    SearchConfig { restarts: 64, steps: 1000, seed: 0, ..SearchConfig::default() }
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut faces = true;
    for n in 2..=5 {
        let t = regular_simplex(n).unwrap();
        for k in 1..n {
            let res = search_max_kball(&t, k, &kball_config()).unwrap();
            worst = worst.max((res.objective - prop2_radius(n, k)).abs());
            faces &= face_parallel_check(&t, &res.best, 1e-4);
        }
    }
    let t = start.elapsed();
    verdict(
        worst <= 1e-3 && faces && t < Duration::from_secs(60),
        format!("max |r − r(n,k)| {worst:.2e}, face-parallel {faces}, {t:.2?}"),
    )
}

fn criterion_4() -> Verdict {
    let t = regular_simplex(3).unwrap();
    let res = search_max_kball(&t, 2, &kball_config()).unwrap();
    let err = (res.objective - 2f64.sqrt()).abs();
    let face = face_parallel_check(&t, &res.best, 1e-4);
    verdict(err <= 1e-4 && face, format!("r = {:.10}, |r − √2| {err:.2e}, face-parallel {face}", res.objective))
}

fn certified_bodies(count: usize) -> Vec<(String, JohnFormPolytope, JohnCertificate)> {
    let tol = Tolerances::default();
    let mut out = Vec::new();
    for n in 2..=6 {
        for (name, body) in [
            ("cube", cube(n).unwrap()),
            ("simplex", regular_simplex(n).unwrap()),
            ("cross", cross_polytope(n).unwrap()),
        ] {
            let cert = certify_john_form(&body, &tol).unwrap();
            out.push((format!("{name}({n})"), body, cert));
        }
    }
    let mut i = 0u64;
    while out.len() < count {
        let mut rng = rng_for(5, i);
        let n = 2 + (i as usize % 5);
        if let Some((body, cert)) = random_certified_body(&mut rng, n, 3 * min_random_contacts(n), &tol) {
            out.push((format!("random#{i}({n})"), body, cert));
        }
        i += 1;
    }
    out
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let bodies = certified_bodies(200);
    let mut worst_volume = f64::INFINITY;
    let mut worst_sq = f64::INFINITY;
    let mut worst_sum = f64::INFINITY;
    let mut worst_identity: f64 = 0.0;
    let mut iterates = 0usize;
    for (i, (_, body, cert)) in bodies.iter().enumerate() {
        let n = body.dim();
        let k = 1 + i % (n - 1);
        let cfg = SearchConfig { restarts: 1, steps: 15, seed: i as u64, record_iterates: true, ..SearchConfig::default() };
        let res = search_max_kellipsoid(body, Some(cert), k, &cfg).unwrap();
        // ∏α ≤ r^k (1 + 1e-6) in log form
        let bound = k as f64 * prop2_radius(n, k).ln() + (1.0 + 1e-6f64).ln();
        worst_volume = worst_volume.min(bound - res.best.log_axes());
        for e in &res.iterates {
            let chain = InequalityChain::compute(cert, e);
            worst_sq = worst_sq.min(chain.sum_sq_slack());
            worst_sum = worst_sum.min(chain.sum_slack());
            worst_identity = worst_identity.max(chain.identity_error());
            iterates += 1;
        }
    }
    let mut worst_saturation: f64 = 0.0;
    for n in 3..=4 {
        let t = regular_simplex(n).unwrap();
        let cert = certify_john_form(&t, &Tolerances::default()).unwrap();
        for k in 1..n {
            let cfg = SearchConfig { restarts: 8, steps: 400, seed: 0, ..SearchConfig::default() };
            let res = search_max_kellipsoid(&t, Some(&cert), k, &cfg).unwrap();
            let sum: f64 = res.best.semi_axes.iter().sum();
            let want = ((k * n * (n + 1)) as f64 / (k + 1) as f64).sqrt();
            worst_saturation = worst_saturation.max((sum - want).abs());
        }
    }
    let pass = bodies.len() >= 200
        && worst_volume >= 0.0
        && worst_sq >= -1e-7
        && worst_sum >= -1e-6
        && worst_identity <= 1e-9
        && worst_saturation <= 1e-3;
    verdict(
        pass,
        format!(
            "{} bodies, {iterates} iterates; min volume slack {worst_volume:.2e}, min ∑α² slack {worst_sq:.2e}, \
             min (∑α)² slack {worst_sum:.2e}, max identity err {worst_identity:.2e}, \
             simplex |∑α − bound| {worst_saturation:.2e}, {:.2?}",
            bodies.len(),
            start.elapsed()
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut worst = f64::INFINITY;
    for i in 0..1000u64 {
        let mut rng = rng_for(6, i);
        let k = rng.random_range(1..=6);
        let m = rng.random_range(1..=60);
        let points: Vec<Vector> = (0..m).map(|_| gaussian_vector(&mut rng, k)).collect();
        let ball = min_enclosing_ball(&points, 1e-12).unwrap();
        let d = diameter(&points).unwrap();
        let factor = (k as f64 / (2.0 * (k as f64 + 1.0))).sqrt();
        worst = worst.min(d * factor + 1e-9 - ball.radius);
    }
    let mut equality = true;
    let mut worst_eq: f64 = 0.0;
    for k in 1..=6 {
        let t = regular_simplex(k).unwrap();
        let vertices: Vec<Vector> = t.normals().map(|u| linalg::scale(u, -(k as f64))).collect();
        let ball = min_enclosing_ball(&vertices, 1e-12).unwrap();
        let d = diameter(&vertices).unwrap();
        worst_eq = worst_eq.max((ball.radius - jung_radius(d, k)).abs());
        equality &= jung_equality_witness(&ball, &vertices, 1e-8).is_attained();
    }
    verdict(
        worst >= 0.0 && worst_eq <= 1e-8 && equality,
        format!("min slack {:.2e} over 1000 sets, simplex |r − bound| {worst_eq:.2e}, witness {equality}", worst - 1e-9),
    )
}

fn criterion_7() -> Verdict {
    let bodies = certified_bodies(25);
    let mut worst_general = f64::INFINITY;
    let mut worst_symmetric = f64::INFINITY;
    let mut worst_diam = f64::INFINITY;
    for (i, (_, body, cert)) in bodies.iter().enumerate() {
        let n = body.dim();
        let nf = n as f64;
        let symmetric = cert.is_symmetric(1e-9);
        let mut rng = rng_for(7, i as u64);
        for _ in 0..1000 {
            let d = unit_vector(&mut rng, n);
            let h = body.polytope().support_value(&d).unwrap();
            worst_general = worst_general.min(nf + 1e-6 - h);
            if symmetric {
                worst_symmetric = worst_symmetric.min(nf.sqrt() + 1e-6 - h);
            }
            let width = h + body.polytope().support_value(&linalg::scale(&d, -1.0)).unwrap();
            worst_diam = worst_diam.min((2.0 * nf * (nf + 1.0)).sqrt() + 1e-6 - width);
        }
    }
    let mut worst_edge: f64 = 0.0;
    for n in 2..=6 {
        let t = regular_simplex(n).unwrap();
        let vertices: Vec<Vector> = t
            .normals()
            .map(|u| t.polytope().support_point(&linalg::scale(u, -1.0)).unwrap().point)
            .collect();
        let d = diameter(&vertices).unwrap();
        worst_edge = worst_edge.max((d - (2.0 * (n * (n + 1)) as f64).sqrt()).abs());
    }
    verdict(
        worst_general >= 0.0 && worst_symmetric >= 0.0 && worst_diam >= 0.0 && worst_edge <= 1e-6,
        format!(
            "{} bodies × 1000 directions; min slack n {:.2e}, √n {:.2e}, diameter {:.2e}; simplex edge err {worst_edge:.2e}",
            bodies.len(),
            worst_general - 1e-6,
            worst_symmetric - 1e-6,
            worst_diam - 1e-6
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut worst = f64::INFINITY;
    for i in 0..1000u64 {
        let mut rng = rng_for(8, i);
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=10);
        let mut xs: Vec<Vector> = (0..m).map(|_| gaussian_vector(&mut rng, n)).collect();
        let mut mean = vec![0.0; n];
        for x in &xs {
            linalg::axpy(&mut mean, 1.0 / m as f64, x);
        }
        xs.iter_mut().for_each(|x| *x = linalg::sub(x, &mean));
        let us: Vec<Vector> = (0..m).map(|_| unit_vector(&mut rng, n)).collect();
        let (lhs, rhs) = lemma5_gap(&xs, &us).unwrap();
        worst = worst.min(rhs + 1e-9 - lhs);
    }
    let v = vec![0.3, -1.2, 0.7];
    let u = vec![0.0, 0.6, 0.8];
    let same = lemma5_gap(&[v.clone(), linalg::scale(&v, -1.0)], &[u.clone(), u]).unwrap();
    let e1 = vec![1.0, 0.0];
    let m1 = vec![-1.0, 0.0];
    let opposite = lemma5_gap(&[e1.clone(), m1.clone()], &[e1, m1]).unwrap();
    let exact = same == (0.0, 0.0) && opposite == (4.0, 4.0);
    verdict(
        worst >= 0.0 && exact,
        format!("min slack {:.2e} over 1000 instances, equal-u case {same:?}, opposite case {opposite:?}", worst - 1e-9),
    )
}

fn criterion_9() -> Verdict {
    let mut worst = f64::INFINITY;
    let mut cases = 0;
    for n in 2..=8 {
        let normals: Vec<Vector> = regular_simplex(n).unwrap().normals().cloned().collect();
        for k in 1..=n {
            let lower = ((k * (k + 1)) as f64 * (n as f64 + 1.0) / n as f64).sqrt();
            assert!((lower - projection_sum_lower_bound(n, k)).abs() < 1e-12);
            for i in 0..100u64 {
                let frame = random_frame(&mut rng_for(9, (n * 100 + k) as u64 * 1000 + i), n, k);
                worst = worst.min(projection_norm_sum(&normals, &frame) - lower + 1e-9);
                cases += 1;
            }
        }
    }
    verdict(worst >= 0.0, format!("min slack {:.2e} over {cases} projections", worst - 1e-9))
}

fn run_cli(args: &[&str], dir: &Path) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_johnkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("JOHNKIT_SEED")
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let poly = serde_json::to_string(regular_simplex(3).unwrap().polytope()).unwrap();
    std::fs::write(dir.path().join("simplex3.json"), poly).unwrap();
    let boxed = r#"{"dim":2,"rows":[{"a":[1,0],"b":2},{"a":[-1,0],"b":0},{"a":[0,1],"b":4},{"a":[0,-1],"b":0}]}"#;
    std::fs::write(dir.path().join("box.json"), boxed).unwrap();
    let points = r#"{"dim":2,"points":[[0,0],[1,0],[0.5,0.8660254037844386],[0.2,0.3]]}"#;
    std::fs::write(dir.path().join("points.json"), points).unwrap();
    let commands: [&[&str]; 8] = [
        &["mvie", "--input", "box.json"],
        &["certify", "--input", "simplex3.json"],
        &["john-position", "--input", "box.json"],
        &["kball", "--k", "2", "--restarts", "8", "--seed", "7", "--input", "simplex3.json"],
        &["kellipsoid", "--k", "1", "--restarts", "2", "--steps", "20", "--seed", "3", "--body", "cube:3"],
        &["bounds", "--n", "3", "--k", "2"],
        &["jung", "--input", "points.json"],
        &["stress", "--trials", "20", "--seed", "5"],
    ];
    for args in commands {
        let (a, ca) = run_cli(args, dir.path());
        let (b, cb) = run_cli(args, dir.path());
        if ca != 0 || a.is_empty() {
            return verdict(false, format!("`{}` exited {ca}", args.join(" ")));
        }
        if a != b || ca != cb {
            return verdict(false, format!("`{}` differs between runs", args.join(" ")));
        }
    }
    verdict(true, format!("{} subcommands byte-identical across two runs", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("MVIE of cube and simplex is the unit ball", criterion_1),
        ("John weights of simplex and cube", criterion_2),
        ("largest k-balls in the simplex", criterion_3),
        ("tetrahedron disc radius √2 in a face", criterion_4),
        ("k-ellipsoid volume bound and inequality chain", criterion_5),
        ("Jung radius bound and simplex equality", criterion_6),
        ("containment and diameter bounds", criterion_7),
        ("centered-sum gap inequality and equality cases", criterion_8),
        ("projection norm-sum lower bound", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!("[{}] criterion {:>2}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
