//! H-representation polytopes and the standard John-position test bodies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, all_finite, dot, norm, Matrix, Vector};

/// One halfspace `⟨a, x⟩ ≤ b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: Vector,
    pub b: f64,
}

impl Halfspace {
    pub fn new(a: Vector, b: f64) -> Self {
        Halfspace { a, b }
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        self.b - dot(&self.a, x)
    }
}

/// `{x ∈ ℝⁿ : ⟨a_i, x⟩ ≤ b_i}`. Boundedness is not checked here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolytope")]
pub struct HalfspacePolytope {
    dim: usize,
    rows: Vec<Halfspace>,
}

#[derive(Deserialize)]
struct RawPolytope {
    dim: usize,
    rows: Vec<Halfspace>,
}

impl TryFrom<RawPolytope> for HalfspacePolytope {
    type Error = Error;
    fn try_from(raw: RawPolytope) -> Result<Self> {
        HalfspacePolytope::new(raw.dim, raw.rows)
    }
}

impl HalfspacePolytope {
    pub fn new(dim: usize, rows: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.a.len() != dim {
                return Err(Error::DimMismatch { expected: dim, got: r.a.len() });
            }
            if !all_finite(&r.a) || !r.b.is_finite() {
                return Err(Error::InvalidInput(format!("row {i} is not finite")));
            }
            if norm(&r.a) == 0.0 {
                return Err(Error::InvalidInput(format!("row {i} has a zero normal")));
            }
        }
        Ok(HalfspacePolytope { dim, rows })
    }

    /// Axis-aligned box `∏ [lo_j, hi_j]`.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let n = lo.len();
        let mut rows = Vec::with_capacity(2 * n);
        for j in 0..n {
            rows.push(Halfspace::new(linalg::unit(n, j), hi[j]));
            rows.push(Halfspace::new(linalg::scale(&linalg::unit(n, j), -1.0), -lo[j]));
        }
        Self::new(n, rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Halfspace] {
        &self.rows
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// True iff `⟨a_i, x⟩ ≤ b_i + tol` for every row.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.rows.iter().all(|r| dot(&r.a, x) <= r.b + tol))
    }

    /// Translates `center` to the origin and rescales every row to offset 1:
    /// `(a_i / (b_i − ⟨a_i, center⟩), 1)`.
    pub fn normalize(&self, center: &[f64]) -> Result<HalfspacePolytope> {
        self.check_dim(center)?;
        let mut rows = Vec::with_capacity(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            let slack = r.slack(center);
            if !(slack > 0.0) {
                return Err(Error::NotInterior { row: i, slack });
            }
            rows.push(Halfspace::new(linalg::scale(&r.a, 1.0 / slack), 1.0));
        }
        Ok(HalfspacePolytope { dim: self.dim, rows })
    }

    /// Maximizer of `⟨direction, x⟩` over the polytope.
    pub fn support_point(&self, direction: &[f64]) -> Result<linalg::LpSolution> {
        self.check_dim(direction)?;
        let cons: Vec<(Vector, f64)> = self.rows.iter().map(|r| (r.a.clone(), r.b)).collect();
        linalg::solve_lp(direction, &cons)
    }

    /// `h_P(d) = max{⟨d, x⟩ : x ∈ P}`.
    pub fn support_value(&self, direction: &[f64]) -> Result<f64> {
        Ok(self.support_point(direction)?.value)
    }

    /// Checks boundedness through the support values in ±e_j.
    pub fn is_bounded(&self) -> Result<bool> {
        for j in 0..self.dim {
            for s in [1.0, -1.0] {
                match self.support_value(&linalg::scale(&linalg::unit(self.dim, j), s)) {
                    Ok(_) => {}
                    Err(Error::Unbounded) => return Ok(false),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(true)
    }

    /// Image under `x ↦ M x + t` for invertible `M`.
    pub fn affine_image(&self, m: &Matrix, t: &[f64]) -> Result<HalfspacePolytope> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: m.rows() });
        }
        self.check_dim(t)?;
        // x = M⁻¹(x' − t), so ⟨a, x⟩ = ⟨M⁻ᵀa, x'⟩ − ⟨M⁻ᵀa, t⟩
        let inv_t = linalg::inverse(m)?.transpose();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let a = inv_t.matvec(&r.a);
                let b = r.b + dot(&a, t);
                Halfspace::new(a, b)
            })
            .collect();
        HalfspacePolytope::new(self.dim, rows)
    }
}

/// A polytope `{x : ⟨u_i, x⟩ ≤ 1}` whose rows all have offset 1. Rows flagged
/// tangent have unit normals, so their hyperplanes touch the unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohnFormPolytope {
    polytope: HalfspacePolytope,
    tangent: Vec<bool>,
}

impl JohnFormPolytope {
    /// Every normal must have unit length within 1e-12.
    pub fn from_unit_normals(normals: Vec<Vector>) -> Result<Self> {
        let dim = normals.first().map(|u| u.len()).ok_or(Error::EmptyInput)?;
        for (i, u) in normals.iter().enumerate() {
            if (norm(u) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!("normal {i} is not a unit vector")));
            }
        }
        let n_rows = normals.len();
        let rows = normals.into_iter().map(|u| Halfspace::new(u, 1.0)).collect();
        Ok(JohnFormPolytope {
            polytope: HalfspacePolytope::new(dim, rows)?,
            tangent: vec![true; n_rows],
        })
    }

    /// Wraps a polytope whose offsets are all 1 and whose normals have norm
    /// at most 1 + `tol`; rows with norm within `tol` of 1 are flagged tangent.
    pub fn from_polytope(p: HalfspacePolytope, tol: f64) -> Result<Self> {
        let mut tangent = Vec::with_capacity(p.rows.len());
        for (i, r) in p.rows.iter().enumerate() {
            if (r.b - 1.0).abs() > tol {
                return Err(Error::InvalidInput(format!("row {i} has offset {} ≠ 1", r.b)));
            }
            let nr = norm(&r.a);
            if nr > 1.0 + tol {
                return Err(Error::NotInscribed { row: i, margin: 1.0 - nr });
            }
            tangent.push((nr - 1.0).abs() <= tol);
        }
        Ok(JohnFormPolytope { polytope: p, tangent })
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim
    }

    pub fn polytope(&self) -> &HalfspacePolytope {
        &self.polytope
    }

    pub fn into_polytope(self) -> HalfspacePolytope {
        self.polytope
    }

    pub fn tangent(&self) -> &[bool] {
        &self.tangent
    }

    /// Row normals `a_i` (offset 1 implied).
    pub fn normals(&self) -> impl Iterator<Item = &Vector> + '_ {
        self.polytope.rows.iter().map(|r| &r.a)
    }

    /// Normals of the tangent rows, i.e. the contact points with the unit sphere.
    pub fn tangent_normals(&self) -> Vec<Vector> {
        self.polytope
            .rows
            .iter()
            .zip(&self.tangent)
            .filter(|(_, t)| **t)
            .map(|(r, _)| r.a.clone())
            .collect()
    }
}

/// Regular simplex of inradius 1 circumscribing the unit ball.
///
/// Built recursively: `u_1 = e_n` and, for the remaining n normals,
/// `u_{i+1} = (−√(1 − 1/n²)·w_i, −1/n)` where `w_i` are the normals of the
/// (n−1)-dimensional simplex.
pub fn regular_simplex(n: usize) -> Result<JohnFormPolytope> {
    if n == 0 {
        return Err(Error::InvalidArgs("dimension must be at least 1".into()));
    }
    JohnFormPolytope::from_unit_normals(simplex_normals(n))
}

fn simplex_normals(n: usize) -> Vec<Vector> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let nf = n as f64;
    let lower = simplex_normals(n - 1);
    let radial = (1.0 - 1.0 / (nf * nf)).sqrt();
    let mut out = Vec::with_capacity(n + 1);
    out.push(linalg::unit(n, n - 1));
    for w in lower {
        let mut u: Vector = w.iter().map(|x| -radial * x).collect();
        u.push(-1.0 / nf);
        // exact renormalization; only removes rounding
        let s = norm(&u);
        out.push(u.into_iter().map(|x| x / s).collect());
    }
    out
}

/// `[−1, 1]ⁿ`: normals `±e_i`.
pub fn cube(n: usize) -> Result<JohnFormPolytope> {
    if n == 0 {
        return Err(Error::InvalidArgs("dimension must be at least 1".into()));
    }
    let mut normals = Vec::with_capacity(2 * n);
    for i in 0..n {
        normals.push(linalg::unit(n, i));
        normals.push(linalg::scale(&linalg::unit(n, i), -1.0));
    }
    JohnFormPolytope::from_unit_normals(normals)
}

/// `√n·B₁ⁿ`: normals `(±1, …, ±1)/√n`.
pub fn cross_polytope(n: usize) -> Result<JohnFormPolytope> {
    if n == 0 {
        return Err(Error::InvalidArgs("dimension must be at least 1".into()));
    }
    if n > 20 {
        return Err(Error::TooLarge(n));
    }
    let s = 1.0 / (n as f64).sqrt();
    let normals = (0..(1usize << n))
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { -s } else { s })
                .collect()
        })
        .collect();
    JohnFormPolytope::from_unit_normals(normals)
}
