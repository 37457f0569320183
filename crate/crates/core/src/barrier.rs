//! Log-barrier Newton solver for
//!
//! ```text
//! maximize   ∑_j log L_jj
//! subject to ⟨a_i, y⟩ + ‖Lᵀ w_i‖ ≤ b_i
//! ```
//!
//! over a center `y ∈ ℝⁿ` and a lower-triangular `L ∈ ℝ^{k×k}` with positive
//! diagonal. With `w_i = a_i` (k = n) this is the maximal-volume inscribed
//! ellipsoid `{y + L u : ‖u‖ ≤ 1}`; with `w_i = Vᵀa_i` for an n×k frame V it
//! is the largest k-dimensional ellipsoid `{y + V L u}` parallel to span V.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, dot, Matrix, SymMatrix, Vector};

#[derive(Debug, Clone)]
pub(crate) struct FlatRow {
    pub a: Vector,
    pub w: Vector,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FlatIterate {
    pub y: Vector,
    /// Lower triangle of L, row by row: (0,0), (1,0), (1,1), (2,0), …
    pub l: Vector,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct BarrierOptions {
    pub mu_start: f64,
    pub mu_factor: f64,
    pub mu_stop: f64,
    pub newton_tol: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierOutcome {
    pub iterate: FlatIterate,
    /// Objective at the end of each centering step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn tri_len(k: usize) -> usize {
    k * (k + 1) / 2
}

fn tri_idx(p: usize, q: usize) -> usize {
    debug_assert!(p >= q);
    p * (p + 1) / 2 + q
}

impl FlatIterate {
    pub fn from_parts(y: Vector, l: &Matrix) -> Self {
        let k = l.rows();
        let mut tri = vec![0.0; tri_len(k)];
        for p in 0..k {
            for q in 0..=p {
                tri[tri_idx(p, q)] = l[(p, q)];
            }
        }
        FlatIterate { y, l: tri }
    }

    pub fn l_matrix(&self, k: usize) -> Matrix {
        let mut m = Matrix::zeros(k, k);
        for p in 0..k {
            for q in 0..=p {
                m[(p, q)] = self.l[tri_idx(p, q)];
            }
        }
        m
    }

    /// `L Lᵀ`
    pub fn shape(&self, k: usize) -> SymMatrix {
        let l = self.l_matrix(k);
        let mut s = SymMatrix::zeros(k);
        for i in 0..k {
            for j in 0..=i {
                s.set(i, j, (0..=j).map(|q| l[(i, q)] * l[(j, q)]).sum());
            }
        }
        s
    }
}

pub(crate) struct FlatProblem {
    pub n: usize,
    pub k: usize,
    pub rows: Vec<FlatRow>,
}

impl FlatProblem {
    fn nvars(&self) -> usize {
        self.n + tri_len(self.k)
    }

    /// `Lᵀ w`
    fn lt_w(&self, l: &[f64], w: &[f64]) -> Vector {
        let k = self.k;
        let mut z = vec![0.0; k];
        for p in 0..k {
            if w[p] == 0.0 {
                continue;
            }
            for (q, zq) in z.iter_mut().enumerate().take(p + 1) {
                *zq += l[tri_idx(p, q)] * w[p];
            }
        }
        z
    }

    pub fn slacks(&self, it: &FlatIterate) -> Vector {
        self.rows
            .iter()
            .map(|r| r.b - dot(&r.a, &it.y) - dot(&self.lt_w(&it.l, &r.w), &self.lt_w(&it.l, &r.w)).sqrt())
            .collect()
    }

    pub fn objective(&self, it: &FlatIterate) -> f64 {
        (0..self.k).map(|j| it.l[tri_idx(j, j)].ln()).sum()
    }

    fn strictly_feasible(&self, it: &FlatIterate) -> bool {
        (0..self.k).all(|j| it.l[tri_idx(j, j)] > 0.0) && self.slacks(it).iter().all(|s| *s > 0.0)
    }

    /// Barrier function `−t·obj − ∑ log s_i`; `None` outside the domain.
    fn barrier(&self, it: &FlatIterate, t: f64) -> Option<f64> {
        let mut f = 0.0;
        for j in 0..self.k {
            let d = it.l[tri_idx(j, j)];
            if !(d > 0.0) {
                return None;
            }
            f -= t * d.ln();
        }
        for s in self.slacks(it) {
            if !(s > 0.0) {
                return None;
            }
            f -= s.ln();
        }
        Some(f)
    }

    fn grad_hess(&self, it: &FlatIterate, t: f64) -> (Vector, SymMatrix) {
        let n = self.n;
        let k = self.k;
        let nv = self.nvars();
        let mut grad = vec![0.0; nv];
        let mut hess = SymMatrix::zeros(nv);
        for j in 0..k {
            let d = it.l[tri_idx(j, j)];
            grad[n + tri_idx(j, j)] -= t / d;
            let v = hess.get(n + tri_idx(j, j), n + tri_idx(j, j));
            hess.set(n + tri_idx(j, j), n + tri_idx(j, j), v + t / (d * d));
        }
        let mut g = vec![0.0; nv];
        for r in &self.rows {
            let z = self.lt_w(&it.l, &r.w);
            let rho = dot(&z, &z).sqrt();
            let s = r.b - dot(&r.a, &it.y) - rho;
            g.iter_mut().for_each(|v| *v = 0.0);
            g[..n].copy_from_slice(&r.a);
            if rho > 0.0 {
                for p in 0..k {
                    for q in 0..=p {
                        g[n + tri_idx(p, q)] = z[q] * r.w[p] / rho;
                    }
                }
            }
            let inv_s = 1.0 / s;
            crate::linalg::axpy(&mut grad, inv_s, &g);
            hess.add_outer(inv_s * inv_s, &g);
            if rho > 0.0 {
                // ∇²ρ on the L block, scaled by 1/s
                let rho3 = rho * rho * rho;
                for p in 0..k {
                    if r.w[p] == 0.0 {
                        continue;
                    }
                    for q in 0..=p {
                        let i1 = n + tri_idx(p, q);
                        for pr in 0..k {
                            if r.w[pr] == 0.0 {
                                continue;
                            }
                            for qs in 0..=pr {
                                let i2 = n + tri_idx(pr, qs);
                                if i2 > i1 {
                                    continue;
                                }
                                let delta = if q == qs { 1.0 / rho } else { 0.0 };
                                let h = r.w[p] * r.w[pr] * (delta - z[q] * z[qs] / rho3);
                                let v = hess.get(i1, i2);
                                hess.set(i1, i2, v + inv_s * h);
                            }
                        }
                    }
                }
            }
        }
        (grad, hess)
    }

    fn step(&self, it: &FlatIterate, dir: &[f64], alpha: f64) -> FlatIterate {
        let n = self.n;
        FlatIterate {
            y: it.y.iter().zip(&dir[..n]).map(|(a, d)| a + alpha * d).collect(),
            l: it.l.iter().zip(&dir[n..]).map(|(a, d)| a + alpha * d).collect(),
        }
    }

    /// Path-following from a strictly feasible start.
    pub fn solve(&self, start: FlatIterate, opts: &BarrierOptions) -> Result<BarrierOutcome> {
        if !self.strictly_feasible(&start) {
            return Err(Error::InvalidInput("barrier start is not strictly feasible".into()));
        }
        let mut it = start;
        let mut mu = opts.mu_start;
        let mut iterations = 0;
        let mut trace = Vec::new();
        let mut converged = false;
        'outer: loop {
            let t = 1.0 / mu;
            let mut centered = false;
            while iterations < opts.max_iterations {
                iterations += 1;
                let (grad, hess) = self.grad_hess(&it, t);
                let dir = match newton_direction(&grad, &hess) {
                    Some(d) => d,
                    None => break,
                };
                let slope = dot(&grad, &dir);
                let decrement = -slope;
                let f0 = self.barrier(&it, t).expect("iterate stays in the domain");
                // below the rounding level of f the decrement carries no information
                let floor = opts.newton_tol.max(1e-14 * f0.abs());
                if !(decrement > 0.0) || decrement / 2.0 <= floor {
                    centered = true;
                    break;
                }
                let mut alpha = 1.0;
                let mut accepted = None;
                while alpha > 1e-16 {
                    let cand = self.step(&it, &dir, alpha);
                    if let Some(f) = self.barrier(&cand, t) {
                        if f <= f0 + 0.25 * alpha * slope && f < f0 {
                            accepted = Some(cand);
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                match accepted {
                    Some(c) => it = c,
                    None => {
                        // No progress at this precision; treat as centered.
                        centered = true;
                        break;
                    }
                }
            }
            trace.push(self.objective(&it));
            if !centered {
                break 'outer;
            }
            if mu <= opts.mu_stop {
                converged = true;
                break;
            }
            mu *= opts.mu_factor;
        }
        Ok(BarrierOutcome {
            iterate: it,
            trace,
            iterations,
            converged,
        })
    }
}

fn newton_direction(grad: &[f64], hess: &SymMatrix) -> Option<Vector> {
    let neg: Vector = grad.iter().map(|g| -g).collect();
    if let Ok(l) = cholesky(hess) {
        return Some(cholesky_solve(&l, &neg));
    }
    let scale = (0..hess.dim()).map(|i| hess.get(i, i)).fold(0.0, f64::max);
    let mut reg = 1e-12 * scale.max(1.0);
    for _ in 0..8 {
        let mut h = hess.clone();
        for i in 0..h.dim() {
            h.set(i, i, h.get(i, i) + reg);
        }
        if let Ok(l) = cholesky(&h) {
            return Some(cholesky_solve(&l, &neg));
        }
        reg *= 100.0;
    }
    None
}
