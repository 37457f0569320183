//! Maximal-volume inscribed ellipsoids and John position.

use serde::{Deserialize, Serialize};

use crate::barrier::{BarrierOptions, FlatIterate, FlatProblem, FlatRow};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, eig_sym, norm, Frame, Matrix, Vector};
use crate::polytope::{Halfspace, HalfspacePolytope, JohnFormPolytope};
use crate::tol::Tolerances;

/// `{x : ∑_j α_j⁻² ⟨x − y, v_j⟩² ≤ 1}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: Vector,
    pub frame: Frame,
    pub semi_axes: Vector,
}

/// Volume of the unit ball in ℝⁿ, as a logarithm.
pub fn log_unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)
}

// Γ at integers and half-integers, which is all the ball volume needs.
fn ln_gamma(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut v = x;
    while v > 1.25 {
        v -= 1.0;
        acc += v.ln();
    }
    if (v - 0.5).abs() < 1e-12 {
        acc + 0.5 * std::f64::consts::PI.ln()
    } else {
        acc
    }
}

impl Ellipsoid {
    pub fn new(center: Vector, frame: Frame, semi_axes: Vector) -> Result<Self> {
        let n = center.len();
        if frame.dim() != n || frame.rank() != n {
            return Err(Error::DimMismatch { expected: n, got: frame.rank() });
        }
        if semi_axes.len() != n {
            return Err(Error::DimMismatch { expected: n, got: semi_axes.len() });
        }
        if !semi_axes.iter().all(|a| *a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidInput("semi-axes must be positive".into()));
        }
        Ok(Ellipsoid { center, frame, semi_axes })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let n = center.len();
        Self::new(center, Frame::standard(n), vec![radius; n])
    }

    pub fn unit_ball(n: usize) -> Self {
        Ellipsoid {
            center: vec![0.0; n],
            frame: Frame::standard(n),
            semi_axes: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `log ω_n + ∑ log α_j`
    pub fn log_volume(&self) -> f64 {
        log_unit_ball_volume(self.dim()) + self.semi_axes.iter().map(|a| a.ln()).sum::<f64>()
    }

    pub fn volume(&self) -> f64 {
        self.log_volume().exp()
    }

    /// `max_{x∈E} ⟨a, x⟩ = ⟨a, y⟩ + (∑ α_j² ⟨a, v_j⟩²)^{1/2}`
    pub fn support(&self, a: &[f64]) -> f64 {
        let spread: f64 = self
            .frame
            .columns()
            .iter()
            .zip(&self.semi_axes)
            .map(|(v, al)| {
                let t = al * dot(a, v);
                t * t
            })
            .sum();
        dot(a, &self.center) + spread.sqrt()
    }

    /// Symmetric square root of the shape matrix, `V diag(α) Vᵀ`.
    pub fn shape_root(&self) -> Matrix {
        self.scaled_root(|a| a)
    }

    /// `V diag(α⁻¹) Vᵀ`
    pub fn inverse_shape_root(&self) -> Matrix {
        self.scaled_root(|a| 1.0 / a)
    }

    fn scaled_root(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (v, a) in self.frame.columns().iter().zip(&self.semi_axes) {
            let s = f(*a);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += s * v[i] * v[j];
                }
            }
        }
        m
    }

    /// Coordinates in which this ellipsoid is the unit ball.
    pub fn to_unit_coords(&self, x: &[f64]) -> Vector {
        self.inverse_shape_root().matvec(&linalg::sub(x, &self.center))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        norm(&self.to_unit_coords(x)) <= 1.0 + tol
    }

    /// Image under `x ↦ M x + t`.
    pub fn affine_image(&self, m: &Matrix, t: &[f64]) -> Result<Ellipsoid> {
        // E = y + R B with R = shape root; image = My + t + (MR) B.
        let mr = m.matmul(&self.shape_root());
        let shape = linalg::SymMatrix::from_lower(&mr.matmul(&mr.transpose()));
        let center = linalg::add(&m.matvec(&self.center), t);
        from_shape(center, &shape)
    }

    fn from_iterate(it: &FlatIterate, n: usize) -> Result<Ellipsoid> {
        from_shape(it.y.clone(), &it.shape(n))
    }
}

fn from_shape(center: Vector, shape: &linalg::SymMatrix) -> Result<Ellipsoid> {
    let (vals, frame) = eig_sym(shape)?;
    if vals.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NotPositiveDefinite { index: 0, pivot: vals[vals.len() - 1] });
    }
    Ellipsoid::new(center, frame, vals.iter().map(|v| v.sqrt()).collect())
}

/// `b − ⟨a, y⟩ − (∑ α_j² ⟨a, v_j⟩²)^{1/2}`: nonnegative iff the ellipsoid lies
/// in the halfspace, zero iff it touches the hyperplane.
pub fn tangency_margin(e: &Ellipsoid, row: &Halfspace) -> f64 {
    row.b - e.support(&row.a)
}

/// Largest ball inside the polytope (Chebyshev center and radius).
pub fn chebyshev_ball(p: &HalfspacePolytope) -> Result<(Vector, f64)> {
    let n = p.dim();
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut cons: Vec<(Vector, f64)> = p
        .rows()
        .iter()
        .map(|r| {
            let mut g = r.a.clone();
            g.push(norm(&r.a));
            (g, r.b)
        })
        .collect();
    let mut neg_r = vec![0.0; n + 1];
    neg_r[n] = -1.0;
    cons.push((neg_r, 0.0));
    let sol = linalg::solve_lp(&objective, &cons)?;
    let r = sol.point[n];
    Ok((sol.point[..n].to_vec(), r))
}

/// Result of an MVIE solve together with its convergence trace.
#[derive(Debug, Clone)]
pub struct MvieRun {
    pub ellipsoid: Ellipsoid,
    /// log det of the shape factor at the end of every centering step.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

pub fn solve_mvie(p: &HalfspacePolytope) -> Result<Ellipsoid> {
    Ok(solve_mvie_with(p, &Tolerances::default())?.ellipsoid)
}

pub fn solve_mvie_with(p: &HalfspacePolytope, tol: &Tolerances) -> Result<MvieRun> {
    if !p.is_bounded()? {
        return Err(Error::Unbounded);
    }
    let (center, radius) = match chebyshev_ball(p) {
        Ok(b) => b,
        Err(Error::Unbounded) => return Err(Error::Unbounded),
        Err(e) => return Err(e),
    };
    let scale = p.rows().iter().map(|r| r.b.abs() / norm(&r.a)).fold(1.0, f64::max);
    if !(radius > 1e-12 * scale) {
        return Err(Error::Infeasible);
    }
    let start = Ellipsoid::ball(center, 0.9 * radius)?;
    solve_mvie_from(p, &start, tol)
}

/// Runs the barrier method from a given strictly inscribed ellipsoid.
pub fn solve_mvie_from(
    p: &HalfspacePolytope,
    start: &Ellipsoid,
    tol: &Tolerances,
) -> Result<MvieRun> {
    let n = p.dim();
    if start.dim() != n {
        return Err(Error::DimMismatch { expected: n, got: start.dim() });
    }
    let rows = p
        .rows()
        .iter()
        .map(|r| {
            let s = norm(&r.a);
            let a: Vector = r.a.iter().map(|v| v / s).collect();
            FlatRow { w: a.clone(), a, b: r.b / s }
        })
        .collect();
    let problem = FlatProblem { n, k: n, rows };
    let shape = linalg::SymMatrix::from_lower(&start.shape_root().matmul(&start.shape_root()));
    let l = linalg::cholesky(&shape)?;
    let init = FlatIterate::from_parts(start.center.clone(), &l);
    let opts = BarrierOptions {
        mu_start: 1.0,
        mu_factor: 0.5,
        mu_stop: tol.barrier_mu,
        newton_tol: tol.newton_decrement,
        max_iterations: tol.max_newton_iterations,
    };
    let out = problem.solve(init, &opts)?;
    let ellipsoid = Ellipsoid::from_iterate(&out.iterate, n)?;
    if !out.converged {
        return Err(Error::NoConvergence {
            iterations: out.iterations,
            best: Box::new(ellipsoid),
        });
    }
    Ok(MvieRun { ellipsoid, trace: out.trace, iterations: out.iterations })
}

/// `x ↦ M x + t`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    /// Rows of M.
    pub matrix: Vec<Vector>,
    pub offset: Vector,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap { matrix: Matrix::identity(n).to_rows(), offset: vec![0.0; n] }
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.matrix)
    }

    pub fn apply(&self, x: &[f64]) -> Vector {
        linalg::add(&self.as_matrix().matvec(x), &self.offset)
    }
}

/// A body in John position together with the map that put it there.
#[derive(Debug, Clone)]
pub struct JohnPosition {
    pub body: JohnFormPolytope,
    pub map: AffineMap,
    /// MVIE of the original body.
    pub ellipsoid: Ellipsoid,
}

/// Maps the MVIE of `p` onto the unit ball: `x ↦ V diag(α⁻¹) Vᵀ (x − y)`.
pub fn john_position(p: &HalfspacePolytope) -> Result<JohnPosition> {
    john_position_with(p, &Tolerances::default())
}

pub fn john_position_with(p: &HalfspacePolytope, tol: &Tolerances) -> Result<JohnPosition> {
    let e = solve_mvie_with(p, tol)?.ellipsoid;
    let m = e.inverse_shape_root();
    let root = e.shape_root();
    let offset = linalg::scale(&m.matvec(&e.center), -1.0);
    let rows = p
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let slack = r.slack(&e.center);
            if !(slack > 0.0) {
                return Err(Error::NotInterior { row: i, slack });
            }
            Ok(Halfspace::new(linalg::scale(&root.matvec(&r.a), 1.0 / slack), 1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let image = HalfspacePolytope::new(p.dim(), rows)?;
    let body = JohnFormPolytope::from_polytope(image, tol.contact)?;
    Ok(JohnPosition {
        body,
        map: AffineMap { matrix: m.to_rows(), offset },
        ellipsoid: e,
    })
}
