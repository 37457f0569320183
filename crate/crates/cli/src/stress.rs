//! Seeded property suites with worst-slack summaries.
//!
//! Trial `i` of suite `s` draws from `rng_for(stream_seed(seed, s), i)`, so any
//! range of trials can be rerun on its own.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use johnkit::certificate::{min_random_contacts, random_certified_body};
use johnkit::jung::{diameter, jung_radius, lemma5_gap, min_enclosing_ball};
use johnkit::kflat::{projection_norm_sum, projection_sum_lower_bound, search_max_kellipsoid, InequalityChain, SearchConfig};
use johnkit::linalg::{self, Vector};
use johnkit::polytope::regular_simplex;
use johnkit::rng::{gaussian_vector, random_frame, rng_for, stream_seed, unit_vector, SeededRng};
use johnkit::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub name: &'static str,
    pub trials: usize,
    /// Trials that produced no instance (e.g. a sample without a decomposition).
    pub skipped: usize,
    pub worst_slack: f64,
    pub worst_trial: Option<usize>,
    pub tolerance: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StressReport {
    pub seed: u64,
    pub suites: Vec<SuiteSummary>,
}

impl StressReport {
    pub fn violations(&self) -> usize {
        self.suites.iter().map(|s| s.violations).sum()
    }
}

type Trial = fn(&mut SeededRng) -> Option<f64>;

const SUITES: [(&str, f64, Trial); 5] = [
    ("jung_radius", 1e-9, jung_trial),
    ("centered_sum_gap", 1e-9, gap_trial),
    ("projection_sum", 1e-9, projection_trial),
    ("containment", 1e-6, containment_trial),
    ("kellipsoid_volume", 1e-6, kellipsoid_trial),
];

pub fn run(seed: u64, trials: usize) -> StressReport {
    let suites = SUITES
        .iter()
        .enumerate()
        .map(|(s, (name, tolerance, trial))| {
            let suite_seed = stream_seed(seed, s as u64);
            let slacks: Vec<Option<f64>> = (0..trials)
                .into_par_iter()
                .map(|i| trial(&mut rng_for(suite_seed, i as u64)))
                .collect();
            let mut worst: Option<(usize, f64)> = None;
            for (i, v) in slacks.iter().enumerate() {
                if let Some(v) = v {
                    if worst.is_none_or(|(_, w)| *v < w) {
                        worst = Some((i, *v));
                    }
                }
            }
            SuiteSummary {
                name,
                trials,
                skipped: slacks.iter().filter(|v| v.is_none()).count(),
                worst_slack: worst.map_or(f64::INFINITY, |w| w.1),
                worst_trial: worst.map(|w| w.0),
                tolerance: *tolerance,
                violations: slacks.iter().flatten().filter(|v| **v < -tolerance).count(),
            }
        })
        .collect();
    StressReport { seed, suites }
}

fn jung_trial(rng: &mut SeededRng) -> Option<f64> {
    let k = rng.random_range(1..=6);
    let m = rng.random_range(2..=60);
    let points: Vec<Vector> = (0..m).map(|_| gaussian_vector(rng, k)).collect();
    let ball = min_enclosing_ball(&points, 1e-12).ok()?;
    Some(jung_radius(diameter(&points).ok()?, k) - ball.radius)
}

fn gap_trial(rng: &mut SeededRng) -> Option<f64> {
    let n = rng.random_range(1..=5);
    let m = rng.random_range(2..=8);
    let mut xs: Vec<Vector> = (0..m).map(|_| gaussian_vector(rng, n)).collect();
    let mean = linalg::scale(
        &xs.iter().fold(vec![0.0; n], |acc, x| linalg::add(&acc, x)),
        1.0 / m as f64,
    );
    xs.iter_mut().for_each(|x| *x = linalg::sub(x, &mean));
    let us: Vec<Vector> = (0..m).map(|_| unit_vector(rng, n)).collect();
    let (lhs, rhs) = lemma5_gap(&xs, &us).ok()?;
    Some(rhs - lhs)
}

fn projection_trial(rng: &mut SeededRng) -> Option<f64> {
    let n = rng.random_range(2..=8);
    let k = rng.random_range(1..=n);
    let t = regular_simplex(n).ok()?;
    let normals: Vec<Vector> = t.normals().cloned().collect();
    let frame = random_frame(rng, n, k);
    Some(projection_norm_sum(&normals, &frame) - projection_sum_lower_bound(n, k))
}

fn containment_trial(rng: &mut SeededRng) -> Option<f64> {
    let n = rng.random_range(2..=5);
    let tol = Tolerances::default();
    let (body, _) = random_certified_body(rng, n, 3 * min_random_contacts(n), &tol)?;
    let d = unit_vector(rng, n);
    let h = body.polytope().support_value(&d).ok()?;
    Some(n as f64 - h)
}

fn kellipsoid_trial(rng: &mut SeededRng) -> Option<f64> {
    let n = rng.random_range(2..=4);
    let k = rng.random_range(1..n);
    let tol = Tolerances::default();
    let (body, cert) = random_certified_body(rng, n, 3 * min_random_contacts(n), &tol)?;
    let cfg = SearchConfig {
        restarts: 1,
        steps: 10,
        seed: rng.random(),
        record_iterates: true,
        ..SearchConfig::default()
    };
    let res = search_max_kellipsoid(&body, Some(&cert), k, &cfg).ok()?;
    let mut worst = res.reports.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    for e in &res.iterates {
        let chain = InequalityChain::compute(&cert, e);
        worst = worst.min(chain.sum_sq_slack()).min(chain.sum_slack());
    }
    Some(worst)
}
