//! Diameters, minimum enclosing balls, and the diameter/circumradius
//! inequalities they satisfy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cholesky, cholesky_solve, dist, dot, norm, SymMatrix, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        dist(&self.center, x) <= self.radius + tol
    }
}

fn check_points(points: &[Vector]) -> Result<usize> {
    let k = points.first().map(|p| p.len()).ok_or(Error::EmptyInput)?;
    for p in points {
        if p.len() != k {
            return Err(Error::DimMismatch { expected: k, got: p.len() });
        }
        if !linalg::all_finite(p) {
            return Err(Error::InvalidInput("non-finite point".into()));
        }
    }
    Ok(k)
}

/// Maximal pairwise distance and the first pair (row-major) attaining it.
pub fn diameter_pair(points: &[Vector]) -> Result<(f64, usize, usize)> {
    check_points(points)?;
    let mut best = (0.0, 0, 0);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = dist(&points[i], &points[j]);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    Ok(best)
}

pub fn diameter(points: &[Vector]) -> Result<f64> {
    Ok(diameter_pair(points)?.0)
}

/// `d·√(k / (2(k+1)))`: every set of diameter d in ℝᵏ fits in a ball of this
/// radius.
pub fn jung_radius(d: f64, k: usize) -> f64 {
    let k = k as f64;
    d * (k / (2.0 * (k + 1.0))).sqrt()
}

/// Smallest ball whose boundary passes through all points of `subset` and
/// whose center lies in their affine hull. Returns the barycentric
/// coordinates of the center alongside, or `None` for affinely dependent
/// subsets.
fn circumball(points: &[&[f64]]) -> Option<(Ball, Vector)> {
    let x0 = points[0];
    let m = points.len() - 1;
    if m == 0 {
        return Some((Ball { center: x0.to_vec(), radius: 0.0 }, vec![1.0]));
    }
    let diffs: Vec<Vector> = points[1..].iter().map(|p| linalg::sub(p, x0)).collect();
    let mut gram = SymMatrix::zeros(m);
    for i in 0..m {
        for j in 0..=i {
            gram.set(i, j, dot(&diffs[i], &diffs[j]));
        }
    }
    let rhs: Vector = (0..m).map(|i| 0.5 * gram.get(i, i)).collect();
    let l = cholesky(&gram).ok()?;
    // reject nearly dependent subsets
    let diag_min = (0..m).map(|i| l[(i, i)]).fold(f64::INFINITY, f64::min);
    let diag_max = (0..m).map(|i| l[(i, i)]).fold(0.0, f64::max);
    if diag_min <= 1e-9 * diag_max {
        return None;
    }
    let mu = cholesky_solve(&l, &rhs);
    let mut center = x0.to_vec();
    for (d, c) in diffs.iter().zip(&mu) {
        linalg::axpy(&mut center, *c, d);
    }
    let mut bary = Vec::with_capacity(m + 1);
    bary.push(1.0 - mu.iter().sum::<f64>());
    bary.extend_from_slice(&mu);
    let radius = dist(&center, x0);
    Some((Ball { center, radius }, bary))
}

/// Exact minimum enclosing ball of a small set by enumerating support
/// subsets of size ≤ k+1.
fn exact_small_meb(points: &[Vector], k: usize, tol: f64) -> Ball {
    let m = points.len();
    let mut best: Option<Ball> = None;
    for mask in 1u32..(1u32 << m) {
        let size = mask.count_ones() as usize;
        if size > k + 1 {
            continue;
        }
        let subset: Vec<&[f64]> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| points[i].as_slice())
            .collect();
        let Some((ball, bary)) = circumball(&subset) else {
            continue;
        };
        if bary.iter().any(|b| *b < -1e-12) {
            continue;
        }
        if let Some(b) = &best {
            if ball.radius >= b.radius {
                continue;
            }
        }
        let slack = tol.max(1e-12 * (1.0 + ball.radius));
        if points.iter().all(|p| ball.contains(p, slack)) {
            best = Some(ball);
        }
    }
    best.unwrap_or_else(|| {
        // Only reachable when every support subset is numerically degenerate.
        let mut center = vec![0.0; k];
        for p in points {
            linalg::axpy(&mut center, 1.0 / m as f64, p);
        }
        let radius = points.iter().map(|p| dist(p, &center)).fold(0.0, f64::max);
        Ball { center, radius }
    })
}

/// Minimum enclosing ball.
///
/// A few Bădoiu–Clarkson core-set steps give an approximate center; the
/// points farthest from it seed a working set whose exact ball is computed by
/// support-subset enumeration. Any point outside that ball joins the working
/// set (which is pruned back to the current support) until no point lies
/// outside.
pub fn min_enclosing_ball(points: &[Vector], tol: f64) -> Result<Ball> {
    let k = check_points(points)?;
    if points.len() == 1 {
        return Ok(Ball { center: points[0].clone(), radius: 0.0 });
    }

    // Bădoiu–Clarkson: c ← c + (p_far − c)/(i+1)
    let mut c = points[0].clone();
    let iterations = 4 * (k + 1) * (k + 1);
    for i in 1..=iterations {
        let far = farthest(points, &c);
        let step = 1.0 / (i as f64 + 1.0);
        let d = linalg::sub(&points[far], &c);
        linalg::axpy(&mut c, step, &d);
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| dist(&points[b], &c).total_cmp(&dist(&points[a], &c)).then(a.cmp(&b)));
    let mut working: Vec<Vector> = order
        .iter()
        .take((k + 1).min(points.len()))
        .map(|&i| points[i].clone())
        .collect();

    for _ in 0..(10 * points.len() + 100) {
        let ball = exact_small_meb(&working, k, 0.0);
        let far = farthest(points, &ball.center);
        let slack = tol.max(1e-12 * (1.0 + ball.radius));
        if dist(&points[far], &ball.center) <= ball.radius + slack {
            return Ok(ball);
        }
        // keep only the current support, then add the violator
        let shell = 1e-10 * (1.0 + ball.radius);
        working.retain(|p| dist(p, &ball.center) >= ball.radius - shell);
        if working.len() > k + 1 {
            working.truncate(k + 1);
        }
        working.push(points[far].clone());
    }
    Err(Error::IterationLimit("min_enclosing_ball"))
}

fn farthest(points: &[Vector], c: &[f64]) -> usize {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, p) in points.iter().enumerate() {
        let d = dist(p, c);
        if d > best.0 {
            best = (d, i);
        }
    }
    best.1
}

/// Both sides of `(∑⟨x_i,u_i⟩)² ≤ ∑_{i,j} ‖x_i‖‖x_j‖(1 − ⟨u_i,u_j⟩)`.
///
/// Requires `∑ x_i = 0` (within 1e-10·max‖x_i‖) and unit `u_i` (within 1e-10).
pub fn lemma5_gap(xs: &[Vector], us: &[Vector]) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if xs.len() != us.len() {
        return Err(Error::InvalidInput("xs and us differ in length".into()));
    }
    let n = xs[0].len();
    let mut sum = vec![0.0; n];
    let mut max_norm: f64 = 0.0;
    for x in xs {
        if x.len() != n {
            return Err(Error::DimMismatch { expected: n, got: x.len() });
        }
        linalg::axpy(&mut sum, 1.0, x);
        max_norm = max_norm.max(norm(x));
    }
    if norm(&sum) > 1e-10 * max_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput("xs do not sum to zero".into()));
    }
    for u in us {
        if u.len() != n {
            return Err(Error::DimMismatch { expected: n, got: u.len() });
        }
        if (norm(u) - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput("us must be unit vectors".into()));
        }
    }
    let s: f64 = xs.iter().zip(us).map(|(x, u)| dot(x, u)).sum();
    let norms: Vector = xs.iter().map(|x| norm(x)).collect();
    let mut rhs = 0.0;
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            rhs += norms[i] * norms[j] * (1.0 - dot(&us[i], &us[j]));
        }
    }
    Ok((s * s, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityWitness {
    Attained,
    NotAttained,
    /// Too many boundary points to search exhaustively.
    Indeterminate,
}

impl EqualityWitness {
    pub fn is_attained(self) -> bool {
        self == EqualityWitness::Attained
    }
}

/// Maximum number of boundary points searched by [`jung_equality_witness`].
pub const WITNESS_SEARCH_CAP: usize = 12;

/// Looks for k+1 points at distance `radius ± tol` from their own average,
/// among the points at distance `radius ± tol` from the ball center.
pub fn jung_equality_witness(ball: &Ball, points: &[Vector], tol: f64) -> EqualityWitness {
    let Some(k) = points.first().map(|p| p.len()) else {
        return EqualityWitness::NotAttained;
    };
    let shell: Vec<&Vector> = points
        .iter()
        .filter(|p| (dist(p, &ball.center) - ball.radius).abs() <= tol)
        .collect();
    if shell.len() < k + 1 {
        return EqualityWitness::NotAttained;
    }
    if shell.len() > WITNESS_SEARCH_CAP {
        return EqualityWitness::Indeterminate;
    }
    let m = shell.len();
    for mask in 0u32..(1u32 << m) {
        if mask.count_ones() as usize != k + 1 {
            continue;
        }
        let subset: Vec<&Vector> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| shell[i]).collect();
        let mut avg = vec![0.0; k];
        for p in &subset {
            linalg::axpy(&mut avg, 1.0 / (k as f64 + 1.0), p);
        }
        if subset.iter().all(|p| (dist(p, &avg) - ball.radius).abs() <= tol) {
            return EqualityWitness::Attained;
        }
    }
    EqualityWitness::NotAttained
}
