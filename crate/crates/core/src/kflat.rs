//! Extremal k-dimensional balls and ellipsoids inside bodies in John form.
//!
//! For a k-frame V with projection P, the k-ball `{y + V z : ‖z‖ ≤ r}` lies in
//! `{x : ⟨u_i, x⟩ ≤ 1}` iff `⟨u_i, y⟩ + r‖P u_i‖ ≤ 1` for every i, which is an
//! LP in (y, r). The k-ellipsoid with semi-axes α_j along v_j lies in the body
//! iff `⟨u_i, y⟩ + ‖T u_i‖ ≤ 1` with `T x = ∑ α_j ⟨x, v_j⟩ v_j`. Searches
//! over the Grassmannian score each frame by the best object parallel to it.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barrier::{tri_len, BarrierOptions, FlatIterate, FlatProblem, FlatRow};
use crate::certificate::JohnCertificate;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, eig_sym, norm, orthonormalize, solve_nnls, Frame, Matrix, Vector};
use crate::polytope::JohnFormPolytope;
use crate::report::BoundReport;
use crate::rng::{random_frame, rng_for};

/// A k-dimensional ellipsoid in ℝⁿ:
/// `{y + ∑_j t_j v_j : ∑_j t_j²/α_j² ≤ 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateEllipsoid {
    pub center: Vector,
    pub frame: Frame,
    pub semi_axes: Vector,
}

impl DegenerateEllipsoid {
    pub fn new(center: Vector, frame: Frame, semi_axes: Vector) -> Result<Self> {
        if frame.dim() != center.len() {
            return Err(Error::DimMismatch { expected: center.len(), got: frame.dim() });
        }
        if semi_axes.len() != frame.rank() || semi_axes.is_empty() {
            return Err(Error::DimMismatch { expected: frame.rank(), got: semi_axes.len() });
        }
        if !semi_axes.iter().all(|a| *a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidInput("semi-axes must be positive".into()));
        }
        Ok(DegenerateEllipsoid { center, frame, semi_axes })
    }

    /// k-ball of radius r.
    pub fn ball(center: Vector, frame: Frame, r: f64) -> Result<Self> {
        let k = frame.rank();
        Self::new(center, frame, vec![r; k])
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn rank(&self) -> usize {
        self.semi_axes.len()
    }

    /// `T x = ∑ α_j ⟨x, v_j⟩ v_j`
    pub fn t_apply(&self, x: &[f64]) -> Vector {
        let c: Vector = self
            .frame
            .coords(x)
            .iter()
            .zip(&self.semi_axes)
            .map(|(c, a)| c * a)
            .collect();
        self.frame.combine(&c)
    }

    /// `∑ log α_j`
    pub fn log_axes(&self) -> f64 {
        self.semi_axes.iter().map(|a| a.ln()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DegenerateEllipsoid {
            center: self.center.clone(),
            frame: self.frame.clone(),
            semi_axes: self.semi_axes.iter().map(|a| a * factor).collect(),
        }
    }
}

/// `√(n(n+1) / (k(k+1)))`: radius of the largest k-ball in the regular
/// simplex of inradius 1.
pub fn r_max(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgs(format!("need 1 ≤ k ≤ n, got n={n}, k={k}")));
    }
    let (n, k) = (n as f64, k as f64);
    Ok((n * (n + 1.0) / (k * (k + 1.0))).sqrt())
}

/// `√(k n (n+1) / (k+1))`
pub fn sum_alpha_bound(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (k * n * (n + 1.0) / (k + 1.0)).sqrt()
}

/// `√(2 n (n+1))`
pub fn diameter_bound(n: usize) -> f64 {
    let n = n as f64;
    (2.0 * n * (n + 1.0)).sqrt()
}

/// `√(k(k+1)(n+1)/n)`, the lower bound on `∑ ‖P u_i‖` over the regular simplex
/// normals for every rank-k projection P.
pub fn projection_sum_lower_bound(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (k * (k + 1.0) * (n + 1.0) / n).sqrt()
}

/// `∑ ‖P u_i‖`
pub fn projection_norm_sum(normals: &[Vector], frame: &Frame) -> f64 {
    normals.iter().map(|u| norm(&frame.coords(u))).sum()
}

/// Per-row margins `1 − ⟨u_i, y⟩ − ‖T u_i‖`; all nonnegative iff the
/// ellipsoid lies in the body.
pub fn kellipsoid_margin(p: &JohnFormPolytope, e: &DegenerateEllipsoid) -> Vec<f64> {
    p.polytope()
        .rows()
        .iter()
        .map(|r| r.b - dot(&r.a, &e.center) - norm(&e.t_apply(&r.a)))
        .collect()
}

fn check_frame(p: &JohnFormPolytope, frame: &Frame) -> Result<()> {
    if frame.dim() != p.dim() {
        return Err(Error::DimMismatch { expected: p.dim(), got: frame.dim() });
    }
    Ok(())
}

fn kball_lp(p: &JohnFormPolytope, frame: &Frame) -> Result<(Vector, f64)> {
    let n = p.dim();
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut cons: Vec<(Vector, f64)> = p
        .polytope()
        .rows()
        .iter()
        .map(|r| {
            let mut g = r.a.clone();
            g.push(norm(&frame.coords(&r.a)));
            (g, r.b)
        })
        .collect();
    let mut neg_r = vec![0.0; n + 1];
    neg_r[n] = -1.0;
    cons.push((neg_r, 0.0));
    let sol = linalg::solve_lp(&objective, &cons)?;
    Ok((sol.point[..n].to_vec(), sol.point[n].max(0.0)))
}

/// Minimum-norm y with `⟨a_i, y⟩ ≤ c_i`, by least-distance programming
/// reduced to NNLS. `None` if the reduction fails numerically.
fn min_norm_point(rows: &[(Vector, f64)], n: usize) -> Option<Vector> {
    // minimize ‖y‖ s.t. G y ≥ h with G = −A, h = −c
    let m = rows.len();
    let mut e = Matrix::zeros(n + 1, m);
    for (i, (a, c)) in rows.iter().enumerate() {
        for j in 0..n {
            e[(j, i)] = -a[j];
        }
        e[(n, i)] = -c;
    }
    let mut f = vec![0.0; n + 1];
    f[n] = 1.0;
    let u = solve_nnls(&e, &f).ok()?;
    let r = linalg::sub(&e.matvec(&u), &f);
    if norm(&r) < 1e-12 || r[n].abs() < 1e-14 {
        return None;
    }
    Some((0..n).map(|j| -r[j] / r[n]).collect())
}

/// Largest k-ball parallel to `frame` inside the body: maximizes r subject to
/// `⟨u_i, y⟩ + r‖P u_i‖ ≤ 1` over `y ∈ ℝⁿ`, `r ≥ 0`. Among optimal centers the
/// minimum-norm one is returned.
pub fn max_kball_in_subspace(p: &JohnFormPolytope, frame: &Frame) -> Result<(Vector, f64)> {
    check_frame(p, frame)?;
    let n = p.dim();
    let (y_lp, r) = kball_lp(p, frame)?;
    let rows: Vec<(Vector, f64)> = p
        .polytope()
        .rows()
        .iter()
        .map(|row| (row.a.clone(), row.b - r * norm(&frame.coords(&row.a))))
        .collect();
    let violation = |y: &[f64]| {
        rows.iter()
            .map(|(a, c)| dot(a, y) - c)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let relaxed: Vec<(Vector, f64)> = rows.iter().map(|(a, c)| (a.clone(), c + 1e-12)).collect();
    let y = match min_norm_point(&relaxed, n) {
        Some(y) if violation(&y) <= 1e-10 && norm(&y) <= norm(&y_lp) + 1e-12 => y,
        _ => y_lp,
    };
    Ok((y, r))
}

/// True iff some k+1 rows have normals whose pairwise differences are fixed
/// by the projection onto the frame, i.e. the frame is parallel to the affine
/// hull of those normals.
pub fn face_parallel_check(p: &JohnFormPolytope, e: &DegenerateEllipsoid, tol: f64) -> bool {
    let normals: Vec<&Vector> = p.normals().collect();
    let m = normals.len();
    let k = e.rank();
    let ok = |i: usize, j: usize| {
        let d = linalg::sub(normals[i], normals[j]);
        linalg::dist(&e.frame.project(&d), &d) <= tol
    };
    let adj: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| i != j && ok(i, j)).collect()).collect();
    fn grow(adj: &[Vec<bool>], clique: &mut Vec<usize>, start: usize, target: usize) -> bool {
        if clique.len() == target {
            return true;
        }
        for v in start..adj.len() {
            if clique.iter().all(|&c| adj[c][v]) {
                clique.push(v);
                if grow(adj, clique, v + 1, target) {
                    return true;
                }
                clique.pop();
            }
        }
        false
    }
    grow(&adj, &mut Vec::new(), 0, k + 1)
}

/// Frame search parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Local steps per restart.
    pub steps: usize,
    /// Step-size factor applied after each rejected move.
    pub anneal: f64,
    /// Initial rotation angle scale (radians).
    pub initial_step: f64,
    pub seed: u64,
    /// Keep every scored candidate in `SearchResult::iterates`.
    pub record_iterates: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 32,
            steps: 200,
            anneal: 0.9,
            initial_step: 0.5,
            seed: 0,
            record_iterates: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: DegenerateEllipsoid,
    /// r for balls, ∑ log α_j for ellipsoids.
    pub objective: f64,
    pub restarts_used: usize,
    pub seed: u64,
    /// Primary bound comparison (radius or volume).
    pub bound_report: BoundReport,
    /// Every bound checked on the winner, including `bound_report`.
    pub reports: Vec<BoundReport>,
    #[serde(skip)]
    pub iterates: Vec<DegenerateEllipsoid>,
}

/// Serialized form of a search outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub center: Vector,
    pub frame: Vec<Vector>,
    pub semi_axes: Vector,
    pub objective: f64,
    pub bound: f64,
    pub slack: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl SearchResult {
    pub fn report(&self) -> SearchReport {
        SearchReport {
            center: self.best.center.clone(),
            frame: self.best.frame.columns().to_vec(),
            semi_axes: self.best.semi_axes.clone(),
            objective: self.objective,
            bound: self.bound_report.bound,
            slack: self.bound_report.slack,
            seed: self.seed,
            restarts: self.restarts_used,
        }
    }
}

struct RestartOutcome {
    best: DegenerateEllipsoid,
    objective: f64,
    iterates: Vec<DegenerateEllipsoid>,
}

/// Rotates frame column `j` toward complement direction `l` by `theta`.
fn givens_move(frame: &Frame, complement: &Frame, j: usize, l: usize, theta: f64) -> Frame {
    let (c, s) = (theta.cos(), theta.sin());
    let mut cols = frame.columns().to_vec();
    let v = &cols[j];
    let w = complement.col(l);
    cols[j] = v.iter().zip(w).map(|(a, b)| c * a + s * b).collect();
    // rounding only; the rotation preserves orthonormality
    orthonormalize(&cols).unwrap_or_else(|_| frame.clone())
}

/// Annealed local search from one random frame. `score` returns the best
/// object parallel to a frame and its objective.
fn local_search<F>(n: usize, k: usize, cfg: &SearchConfig, restart: usize, score: &F) -> Result<RestartOutcome>
where
    F: Fn(&Frame) -> Result<(DegenerateEllipsoid, f64)>,
{
    let mut rng = rng_for(cfg.seed, restart as u64);
    let mut frame = random_frame(&mut rng, n, k);
    let (mut best, mut objective) = score(&frame)?;
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(best.clone());
    }
    let mut step = cfg.initial_step;
    if k == n {
        return Ok(RestartOutcome { best, objective, iterates });
    }
    let mut complement = frame.complement();
    for _ in 0..cfg.steps {
        let j = rng.random_range(0..k);
        let l = rng.random_range(0..n - k);
        let theta = step * rng.sample::<f64, _>(rand_distr::StandardNormal);
        let cand = givens_move(&frame, &complement, j, l, theta);
        let (e, obj) = score(&cand)?;
        if cfg.record_iterates {
            iterates.push(e.clone());
        }
        if obj > objective {
            step = (step * 1.5).min(cfg.initial_step);
            frame = cand;
            complement = frame.complement();
            best = e;
            objective = obj;
        } else {
            step *= cfg.anneal;
            if step < 1e-12 {
                step = cfg.initial_step * 1e-3;
            }
        }
    }
    Ok(RestartOutcome { best, objective, iterates })
}

fn run_restarts<F>(n: usize, k: usize, cfg: &SearchConfig, score: F) -> Result<(RestartOutcome, Vec<DegenerateEllipsoid>)>
where
    F: Fn(&Frame) -> Result<(DegenerateEllipsoid, f64)> + Sync,
{
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgs("restarts must be positive".into()));
    }
    let outcomes: Vec<Result<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| local_search(n, k, cfg, i, &score))
        .collect();
    let mut best: Option<RestartOutcome> = None;
    let mut iterates = Vec::new();
    for out in outcomes {
        let mut out = out?;
        iterates.append(&mut out.iterates);
        // strict improvement keeps the lowest restart index on ties
        if best.as_ref().is_none_or(|b| out.objective > b.objective) {
            best = Some(out);
        }
    }
    Ok((best.expect("at least one restart"), iterates))
}

fn check_search_args(p: &JohnFormPolytope, k: usize) -> Result<usize> {
    let n = p.dim();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgs(format!("need 1 ≤ k < n, got n={n}, k={k}")));
    }
    Ok(n)
}

/// Searches for the largest k-ball in the body over random frames refined by
/// Givens rotations toward the orthogonal complement.
pub fn search_max_kball(p: &JohnFormPolytope, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    let n = check_search_args(p, k)?;
    let score = |frame: &Frame| -> Result<(DegenerateEllipsoid, f64)> {
        let (y, r) = kball_lp(p, frame)?;
        let r_pos = r.max(f64::MIN_POSITIVE);
        Ok((DegenerateEllipsoid::ball(y, frame.clone(), r_pos)?, r))
    };
    let (winner, iterates) = run_restarts(n, k, cfg, score)?;
    let (y, r) = max_kball_in_subspace(p, &winner.best.frame)?;
    let best = DegenerateEllipsoid::ball(y, winner.best.frame.clone(), r)?;
    let bound = r_max(n, k)?;
    let report = BoundReport::upper("r_max", bound, r, 1e-6);
    Ok(SearchResult {
        best,
        objective: r,
        restarts_used: cfg.restarts,
        seed: cfg.seed,
        bound_report: report.clone(),
        reports: vec![report],
        iterates,
    })
}

fn kellipsoid_problem(p: &JohnFormPolytope, frame: &Frame) -> FlatProblem {
    let rows = p
        .polytope()
        .rows()
        .iter()
        .map(|r| FlatRow { a: r.a.clone(), w: frame.coords(&r.a), b: r.b })
        .collect();
    FlatProblem { n: p.dim(), k: frame.rank(), rows }
}

const KELLIPSOID_BARRIER: BarrierOptions = BarrierOptions {
    mu_start: 1.0,
    mu_factor: 0.25,
    mu_stop: 1e-10,
    newton_tol: 1e-10,
    max_iterations: 500,
};

/// Largest-volume k-ellipsoid parallel to span(frame). The shape inside the
/// subspace is a full k×k factor, so the returned frame spans the same space
/// as `frame` but is rotated onto the principal axes.
pub fn max_kellipsoid_in_subspace(p: &JohnFormPolytope, frame: &Frame) -> Result<(DegenerateEllipsoid, f64)> {
    check_frame(p, frame)?;
    let n = p.dim();
    let k = frame.rank();
    let problem = kellipsoid_problem(p, frame);
    let start = FlatIterate::from_parts(vec![0.0; n], &Matrix::from_diag(&vec![0.01; k]));
    debug_assert_eq!(start.l.len(), tri_len(k));
    let out = problem.solve(start, &KELLIPSOID_BARRIER)?;
    let (vals, rot) = eig_sym(&out.iterate.shape(k))?;
    if vals.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NotPositiveDefinite { index: k - 1, pivot: vals[k - 1] });
    }
    let cols: Vec<Vector> = rot.columns().iter().map(|q| frame.combine(q)).collect();
    let axes_frame = Frame::from_columns_unchecked(n, cols);
    let axes: Vector = vals.iter().map(|v| v.sqrt()).collect();
    let e = DegenerateEllipsoid::new(out.iterate.y.clone(), axes_frame, axes)?;
    if !out.converged {
        return Err(Error::NoConvergence {
            iterations: out.iterations,
            best: Box::new(crate::mvie::Ellipsoid::unit_ball(n)),
        });
    }
    let obj = e.log_axes();
    Ok((e, obj))
}

/// Searches for the maximal-volume k-ellipsoid in a body carrying a verified
/// John certificate.
pub fn search_max_kellipsoid(
    p: &JohnFormPolytope,
    cert: Option<&JohnCertificate>,
    k: usize,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    let n = check_search_args(p, k)?;
    let cert = cert.ok_or(Error::CertificateRequired)?;
    if cert.dim() != n || !cert.is_verified(1e-7) {
        return Err(Error::CertificateRequired);
    }
    let score = |frame: &Frame| max_kellipsoid_in_subspace(p, frame);
    let (winner, iterates) = run_restarts(n, k, cfg, score)?;
    let best = winner.best;
    let bound = r_max(n, k)?;
    let kf = k as f64;
    let volume = BoundReport::upper("volume", kf * bound.ln(), best.log_axes(), (1.0 + 1e-6f64).ln());
    let sum: f64 = best.semi_axes.iter().sum();
    let sab = sum_alpha_bound(n, k);
    let sum_report = BoundReport::upper("sum_alpha", sab, sum, sab * 1e-6);
    Ok(SearchResult {
        objective: winner.objective,
        best,
        restarts_used: cfg.restarts,
        seed: cfg.seed,
        bound_report: volume.clone(),
        reports: vec![volume, sum_report],
        iterates,
    })
}

/// Quantities in the chain of inequalities bounding a k-ellipsoid inside
/// `K = {⟨x, u_i⟩ ≤ 1}` for a John certificate `(u_i, c_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityChain {
    pub n: usize,
    pub k: usize,
    /// `∑ α_j²`
    pub sum_sq_alpha: f64,
    /// `∑ α_j`
    pub sum_alpha: f64,
    /// `∑ c_i ‖T u_i‖²`
    pub sum_sq_via_t: f64,
    /// `∑ c_i ⟨T u_i, u_i⟩`
    pub sum_via_t: f64,
    /// `‖y‖²`
    pub center_norm_sq: f64,
}

impl InequalityChain {
    pub fn compute(cert: &JohnCertificate, e: &DegenerateEllipsoid) -> Self {
        let mut sum_sq_via_t = 0.0;
        let mut sum_via_t = 0.0;
        for (u, c) in cert.contacts.iter().zip(&cert.weights) {
            let tu = e.t_apply(u);
            sum_sq_via_t += c * dot(&tu, &tu);
            sum_via_t += c * dot(&tu, u);
        }
        InequalityChain {
            n: e.dim(),
            k: e.rank(),
            sum_sq_alpha: e.semi_axes.iter().map(|a| a * a).sum(),
            sum_alpha: e.semi_axes.iter().sum(),
            sum_sq_via_t,
            sum_via_t,
            center_norm_sq: dot(&e.center, &e.center),
        }
    }

    /// `n + ‖y‖² − ∑ α_j²`
    pub fn sum_sq_slack(&self) -> f64 {
        self.n as f64 + self.center_norm_sq - self.sum_sq_alpha
    }

    /// `n² − ‖y‖² − (∑ α_j)²`
    pub fn sum_slack(&self) -> f64 {
        let n = self.n as f64;
        n * n - self.center_norm_sq - self.sum_alpha * self.sum_alpha
    }

    /// `∑ α_j² ≥ (∑ α_j)²/k` (Cauchy–Schwarz link of the two bounds).
    pub fn cauchy_schwarz_slack(&self) -> f64 {
        self.sum_sq_alpha - self.sum_alpha * self.sum_alpha / self.k as f64
    }

    /// Largest error of the two trace identities.
    pub fn identity_error(&self) -> f64 {
        (self.sum_sq_alpha - self.sum_sq_via_t)
            .abs()
            .max((self.sum_alpha - self.sum_via_t).abs())
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::certificate::certify_john_form;
    use crate::polytope::{cross_polytope, cube, regular_simplex};
    use crate::tol::Tolerances;

    #[test]
    fn formulas() {
        assert!((r_max(3, 2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((r_max(3, 2).unwrap() - 1.4142136).abs() < 1e-7);
        assert_eq!(r_max(5, 5).unwrap(), 1.0);
        assert!((r_max(2, 1).unwrap() - 1.7320508).abs() < 1e-7);
        assert!(matches!(r_max(2, 3), Err(Error::InvalidArgs(_))));
        assert!(matches!(r_max(2, 0), Err(Error::InvalidArgs(_))));

        assert!((sum_alpha_bound(3, 2) - 8f64.sqrt()).abs() < 1e-15);
        assert!((sum_alpha_bound(3, 2) - 2.8284271).abs() < 1e-7);
        for n in 1..=8 {
            for k in 1..=n {
                let lhs = sum_alpha_bound(n, k);
                let rhs = k as f64 * r_max(n, k).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * lhs);
            }
        }
        assert!((diameter_bound(3) - 24f64.sqrt()).abs() < 1e-15);
        assert!((diameter_bound(3) - 4.8989795).abs() < 1e-7);
    }

    #[test]
    fn kball_triangle_edge() {
        let t = regular_simplex(2).unwrap();
        let frame = Frame::standard(2);
        let e1 = Frame::new(vec![frame.col(0).to_vec()]).unwrap();
        let (y, r) = max_kball_in_subspace(&t, &e1).unwrap();
        assert!((r - 3f64.sqrt()).abs() < 1e-12, "{r}");
        assert!(linalg::dist(&y, &[0.0, 1.0]) < 1e-10, "{y:?}");
    }

    #[test]
    fn kball_cube_slab_takes_min_norm_center() {
        let c = cube(2).unwrap();
        let e1 = Frame::new(vec![vec![1.0, 0.0]]).unwrap();
        let (y, r) = max_kball_in_subspace(&c, &e1).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(norm(&y) < 1e-10, "{y:?}");
    }

    #[test]
    fn kball_tetrahedron_face() {
        let t = regular_simplex(3).unwrap();
        let u1 = t.polytope().rows()[0].a.clone();
        let frame = Frame::standard(3);
        // u1 = e3, so the face plane is span(e1, e2)
        let plane = Frame::new(vec![frame.col(0).to_vec(), frame.col(1).to_vec()]).unwrap();
        let (y, r) = max_kball_in_subspace(&t, &plane).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert!(linalg::dist(&y, &u1) < 1e-10, "{y:?}");

        let disc = DegenerateEllipsoid::ball(y, plane, r).unwrap();
        for m in kellipsoid_margin(&t, &disc) {
            assert!(m.abs() < 1e-10);
        }
        let margins = kellipsoid_margin(&t, &disc.scaled(1.01));
        assert!(margins[0].abs() < 1e-10);
        assert!(margins[1..].iter().all(|m| *m < 0.0));
        assert!(face_parallel_check(&t, &disc, 1e-8));
    }

    #[test]
    fn face_parallel_negative() {
        let t = regular_simplex(3).unwrap();
        let d = linalg::scale(&[1.0, 2.0, 3.0], 1.0 / 14f64.sqrt());
        let frame = Frame::new(vec![d]).unwrap();
        let seg = DegenerateEllipsoid::ball(vec![0.0; 3], frame, 1.0).unwrap();
        assert!(!face_parallel_check(&t, &seg, 1e-6));
    }

    #[test]
    fn unit_kball_margins_in_cube() {
        let c = cube(3).unwrap();
        let frame = Frame::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let e = DegenerateEllipsoid::ball(vec![0.0; 3], frame, 1.0).unwrap();
        let m = kellipsoid_margin(&c, &e);
        assert_eq!(m, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn search_triangle() {
        let t = regular_simplex(2).unwrap();
        let cfg = SearchConfig { restarts: 16, ..SearchConfig::default() };
        let res = search_max_kball(&t, 1, &cfg).unwrap();
        assert!((res.objective - 3f64.sqrt()).abs() < 1e-6, "{}", res.objective);
        assert!(res.bound_report.pass);
        assert!(face_parallel_check(&t, &res.best, 1e-4));
    }

    #[test]
    fn search_argument_errors() {
        let t = regular_simplex(2).unwrap();
        assert!(search_max_kball(&t, 2, &SearchConfig::default()).is_err());
        assert!(search_max_kball(&t, 0, &SearchConfig::default()).is_err());
        assert!(matches!(
            search_max_kellipsoid(&t, None, 1, &SearchConfig::default()),
            Err(Error::CertificateRequired)
        ));
    }

    #[test]
    fn kellipsoid_cross_polytope_segment() {
        let x = cross_polytope(2).unwrap();
        let cert = certify_john_form(&x, &Tolerances::default()).unwrap();
        let cfg = SearchConfig { restarts: 4, steps: 100, ..SearchConfig::default() };
        let res = search_max_kellipsoid(&x, Some(&cert), 1, &cfg).unwrap();
        assert!((res.best.semi_axes[0] - 2f64.sqrt()).abs() < 1e-4, "{:?}", res.best.semi_axes);
        assert!(res.best.semi_axes[0] <= r_max(2, 1).unwrap());
    }

    #[test]
    fn chain_identities_hold_for_any_ellipsoid() {
        let c = cube(3).unwrap();
        let cert = certify_john_form(&c, &Tolerances::default()).unwrap();
        let frame = orthonormalize(&[vec![1.0, 2.0, 0.5], vec![0.0, 1.0, -1.0]]).unwrap();
        let e = DegenerateEllipsoid::new(vec![0.1, 0.0, -0.2], frame, vec![0.7, 0.3]).unwrap();
        let chain = InequalityChain::compute(&cert, &e);
        assert!(chain.identity_error() < 1e-12);
    }
}
