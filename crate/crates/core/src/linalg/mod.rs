//! Dense linear-algebra kernels.
//!
//! Everything here works on small dense problems (dimensions up to a few
//! dozen). Vectors are plain `Vec<f64>` / `&[f64]`; matrices are row-major.

mod lp;
mod nnls;

pub use lp::{solve_lp, LpSolution};
pub use nnls::{kkt_residual, solve_nnls};

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = Vec<f64>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vector {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vector {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ x`
    pub fn tr_matvec(&self, x: &[f64]) -> Vector {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for (i, xi) in x.iter().enumerate() {
            axpy(&mut y, *xi, self.row(i));
        }
        y
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: sub(&self.data, &other.data),
        }
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric matrix stored as its lower triangle, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Builds from a dense matrix, reading only the lower triangle.
    pub fn from_lower(m: &Matrix) -> Self {
        assert_eq!(m.rows(), m.cols());
        let mut s = SymMatrix::zeros(m.rows());
        for i in 0..m.rows() {
            for j in 0..=i {
                s.set(i, j, m[(i, j)]);
            }
        }
        s
    }

    /// `∑ w_i v_i ⊗ v_i`
    pub fn weighted_outer_sum(vectors: &[Vector], weights: &[f64], n: usize) -> Self {
        let mut s = SymMatrix::zeros(n);
        for (v, w) in vectors.iter().zip(weights) {
            s.add_outer(*w, v);
        }
        s
    }

    fn idx(i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        i * (i + 1) / 2 + j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[Self::idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[Self::idx(i, j)] = v;
    }

    /// `self += w · v ⊗ v`
    pub fn add_outer(&mut self, w: f64, v: &[f64]) {
        for i in 0..self.n {
            for j in 0..=i {
                self.data[Self::idx(i, j)] += w * v[i] * v[j];
            }
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }

    pub fn frobenius(&self) -> f64 {
        self.to_dense().frobenius()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vector {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

/// `k` orthonormal vectors in ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vector>", into = "Vec<Vector>")]
pub struct Frame {
    dim: usize,
    cols: Vec<Vector>,
}

impl Frame {
    /// Checks orthonormality to 1e-12 before accepting the columns.
    pub fn new(cols: Vec<Vector>) -> Result<Self> {
        Self::with_tolerance(cols, 1e-12)
    }

    pub fn with_tolerance(cols: Vec<Vector>, tol: f64) -> Result<Self> {
        let dim = cols.first().map(|c| c.len()).ok_or(Error::EmptyInput)?;
        for c in &cols {
            if c.len() != dim {
                return Err(Error::DimMismatch { expected: dim, got: c.len() });
            }
            if !all_finite(c) {
                return Err(Error::InvalidMatrix);
            }
        }
        for (j, a) in cols.iter().enumerate() {
            for (l, b) in cols.iter().enumerate().skip(j) {
                let target = if j == l { 1.0 } else { 0.0 };
                if (dot(a, b) - target).abs() > tol {
                    return Err(Error::InvalidInput(format!(
                        "frame columns {j},{l} not orthonormal"
                    )));
                }
            }
        }
        Ok(Frame { dim, cols })
    }

    pub(crate) fn from_columns_unchecked(dim: usize, cols: Vec<Vector>) -> Self {
        Frame { dim, cols }
    }

    pub fn standard(n: usize) -> Self {
        Frame { dim: n, cols: (0..n).map(|i| unit(n, i)).collect() }
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of columns k.
    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn columns(&self) -> &[Vector] {
        &self.cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    /// Coordinates `(⟨v_j, x⟩)_j` of x in the frame.
    pub fn coords(&self, x: &[f64]) -> Vector {
        self.cols.iter().map(|v| dot(v, x)).collect()
    }

    /// Orthogonal projection `P x = ∑ ⟨v_j,x⟩ v_j`.
    pub fn project(&self, x: &[f64]) -> Vector {
        self.combine(&self.coords(x))
    }

    /// `∑ c_j v_j`
    pub fn combine(&self, c: &[f64]) -> Vector {
        let mut out = vec![0.0; self.dim];
        for (v, cj) in self.cols.iter().zip(c) {
            axpy(&mut out, *cj, v);
        }
        out
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Frame {
        let n = self.dim;
        let mut basis: Vec<Vector> = self.cols.clone();
        let mut out = Vec::with_capacity(n - self.rank());
        while basis.len() < n {
            // Greedily take the standard basis vector with the largest residual.
            let mut best: Option<Vector> = None;
            let mut best_norm = -1.0;
            for i in 0..n {
                let mut r = unit(n, i);
                for _ in 0..2 {
                    for b in &basis {
                        let c = dot(b, &r);
                        axpy(&mut r, -c, b);
                    }
                }
                let nr = norm(&r);
                if nr > best_norm {
                    best_norm = nr;
                    best = Some(r);
                }
            }
            let r = scale(&best.expect("n > 0"), 1.0 / best_norm);
            basis.push(r.clone());
            out.push(r);
        }
        Frame { dim: n, cols: out }
    }

    /// Columns as the columns of an n×k matrix.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_columns(&self.cols)
    }

    /// Largest deviation of the Gramian from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, a) in self.cols.iter().enumerate() {
            for (l, b) in self.cols.iter().enumerate() {
                let target = if j == l { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

impl TryFrom<Vec<Vector>> for Frame {
    type Error = Error;
    fn try_from(cols: Vec<Vector>) -> Result<Self> {
        Frame::with_tolerance(cols, 1e-8)
    }
}

impl From<Frame> for Vec<Vector> {
    fn from(f: Frame) -> Self {
        f.cols
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi sweeps.
///
/// Eigenvalues are returned in descending order together with the matching
/// orthonormal eigenvectors.
pub fn eig_sym(m: &SymMatrix) -> Result<(Vector, Frame)> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix);
    }
    let n = m.dim();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut a = m.to_dense();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let cols = order.iter().map(|&i| v.column(i)).collect();
    Ok((values, Frame::from_columns_unchecked(n, cols)))
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = m`.
pub fn cholesky(m: &SymMatrix) -> Result<Matrix> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix);
    }
    let n = m.dim();
    let mut l = Matrix::zeros(n, n);
    let scale = (0..n).map(|i| m.get(i, i).abs()).fold(0.0, f64::max);
    let floor = scale * 1e-14;
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > floor) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vector {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// `log det m` for positive definite m.
pub fn log_det(m: &SymMatrix) -> Result<f64> {
    let l = cholesky(m)?;
    Ok((0..m.dim()).map(|i| 2.0 * l[(i, i)].ln()).sum())
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vector> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimMismatch { expected: n, got: b.len() });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .expect("non-empty range");
        if m[(piv, col)].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient { column: col });
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(piv * n + j, col * n + j);
            }
            x.swap(piv, col);
        }
        let d = m[(col, col)];
        for i in (col + 1)..n {
            let f = m[(i, col)] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[(i, j)] -= f * m[(col, j)];
            }
            x[i] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Ok(x)
}

/// Inverse of a square matrix.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let cols = (0..n)
        .map(|j| lu_solve(a, &unit(n, j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(&cols))
}

/// Gram–Schmidt (two passes) into an orthonormal frame spanning the same
/// space.
pub fn orthonormalize(vectors: &[Vector]) -> Result<Frame> {
    orthonormalize_with(vectors, 1e-10)
}

pub fn orthonormalize_with(vectors: &[Vector], rank_tol: f64) -> Result<Frame> {
    let dim = vectors.first().map(|v| v.len()).ok_or(Error::EmptyInput)?;
    let mut out: Vec<Vector> = Vec::with_capacity(vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimMismatch { expected: dim, got: v.len() });
        }
        if !all_finite(v) {
            return Err(Error::InvalidMatrix);
        }
        let original = norm(v);
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &r);
                axpy(&mut r, -c, q);
            }
        }
        let nr = norm(&r);
        if original == 0.0 || nr <= rank_tol * original {
            return Err(Error::RankDeficient { column: j });
        }
        out.push(scale(&r, 1.0 / nr));
    }
    Ok(Frame::from_columns_unchecked(dim, out))
}

/// Least-squares solution of `a x ≈ b` for full column rank `a`, via
/// Householder QR. Returns `RankDeficient` if a diagonal entry of R falls
/// below `rank_tol` relative to the largest column norm.
pub fn lstsq(a: &Matrix, b: &[f64], rank_tol: f64) -> Result<Vector> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimMismatch { expected: m, got: b.len() });
    }
    if n > m {
        return Err(Error::RankDeficient { column: m });
    }
    let mut r = a.clone();
    let mut qtb = b.to_vec();
    let col_scale = (0..n)
        .map(|j| norm(&r.column(j)))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for k in 0..n {
        let alpha_norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if alpha_norm <= rank_tol * col_scale {
            return Err(Error::RankDeficient { column: k });
        }
        let alpha = if r[(k, k)] > 0.0 { -alpha_norm } else { alpha_norm };
        let mut v: Vector = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 > 0.0 {
            for j in k..n {
                let s: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
                for i in k..m {
                    r[(i, j)] -= s * v[i - k];
                }
            }
            let s: f64 = (k..m).map(|i| v[i - k] * qtb[i]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..m {
                qtb[i] -= s * v[i - k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for j in (i + 1)..n {
            s -= r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    Ok(x)
}
