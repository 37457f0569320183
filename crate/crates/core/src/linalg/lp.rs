//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Solves `maximize ⟨c, z⟩ subject to ⟨g_i, z⟩ ≤ h_i` over free `z`.

use super::{dot, lu_solve, norm, Matrix, Vector};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub point: Vector,
    pub value: f64,
}

const MAX_PIVOTS: usize = 200_000;

struct Tableau {
    /// m rows of `ncols + 1` entries; the last entry is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        self.t[row][col] = 1.0;
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            r[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs Bland's-rule simplex to maximize `cost` over the columns with
    /// `allowed[j]`. Returns `Err(Unbounded)` if an improving ray exists.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool], tol: &Tolerances) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.ncols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .t
                        .iter()
                        .zip(&self.basis)
                        .map(|(r, &b)| cost[b] * r[j])
                        .sum::<f64>();
                reduced > tol.lp_pivot.max(1e-10)
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a <= tol.lp_pivot {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let slack = 1e-12 * (1.0 + br.abs());
                        if ratio < br - slack
                            || (ratio <= br + slack && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(Error::IterationLimit("simplex"))
    }
}

/// Maximizes `⟨objective, z⟩` subject to `⟨g_i, z⟩ ≤ h_i`.
pub fn solve_lp(objective: &[f64], constraints: &[(Vector, f64)]) -> Result<LpSolution> {
    solve_lp_with(objective, constraints, &Tolerances::default())
}

pub fn solve_lp_with(
    objective: &[f64],
    constraints: &[(Vector, f64)],
    tol: &Tolerances,
) -> Result<LpSolution> {
    let d = objective.len();
    if !objective.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("non-finite objective".into()));
    }

    // Normalize rows; drop zero rows after checking them.
    let mut rows: Vec<(Vector, f64)> = Vec::with_capacity(constraints.len());
    for (g, h) in constraints {
        if g.len() != d {
            return Err(Error::DimMismatch { expected: d, got: g.len() });
        }
        if !g.iter().all(|v| v.is_finite()) || !h.is_finite() {
            return Err(Error::InvalidInput("non-finite constraint".into()));
        }
        let s = norm(g);
        if s == 0.0 {
            if *h < -tol.lp_feasibility {
                return Err(Error::Infeasible);
            }
            continue;
        }
        rows.push((g.iter().map(|v| v / s).collect(), h / s));
    }
    let m = rows.len();

    // Columns: z⁺ (d), z⁻ (d), slacks (m), artificials (one per negative rhs).
    let negative: Vec<usize> = (0..m).filter(|&i| rows[i].1 < 0.0).collect();
    let n_struct = 2 * d + m;
    let ncols = n_struct + negative.len();
    let mut std_rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 0;
    for (i, (g, h)) in rows.iter().enumerate() {
        let mut r = vec![0.0; ncols + 1];
        let sign = if *h < 0.0 { -1.0 } else { 1.0 };
        for j in 0..d {
            r[j] = sign * g[j];
            r[d + j] = -sign * g[j];
        }
        r[2 * d + i] = sign;
        r[ncols] = sign * h;
        if *h < 0.0 {
            r[n_struct + art] = 1.0;
            basis.push(n_struct + art);
            art += 1;
        } else {
            basis.push(2 * d + i);
        }
        std_rows.push(r);
    }
    let original = std_rows.clone();
    let mut tab = Tableau { t: std_rows, basis, ncols };

    if !negative.is_empty() {
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(n_struct) {
            *c = -1.0;
        }
        let allowed = vec![true; ncols];
        tab.optimize(&cost, &allowed, tol)?;
        let infeas: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= n_struct)
            .map(|(i, _)| tab.rhs(i).max(0.0))
            .sum();
        if infeas > tol.lp_feasibility {
            return Err(Error::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= n_struct {
                let col = (0..n_struct)
                    .filter(|j| !tab.basis.contains(j))
                    .max_by(|&a, &b| tab.t[i][a].abs().total_cmp(&tab.t[i][b].abs()));
                match col {
                    Some(j) if tab.t[i][j].abs() > 1e-9 => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    _ => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    for j in 0..d {
        cost[j] = objective[j];
        cost[d + j] = -objective[j];
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < n_struct).collect();
    tab.optimize(&cost, &allowed, tol)?;

    // Recompute basic values from the original rows for accuracy.
    let mut xs = vec![0.0; ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        xs[b] = tab.rhs(i);
    }
    if let Some(polished) = polish(&original, &tab.basis, ncols) {
        xs = polished;
    }
    let point: Vector = (0..d).map(|j| xs[j] - xs[d + j]).collect();
    let value = dot(objective, &point);
    Ok(LpSolution { point, value })
}

/// Solves `A_B x_B = rhs` restricted to rows whose basic variable is
/// structural. Rows that were removed as redundant are reconstructed by
/// choosing, for each basic column, the original rows it can be solved from.
fn polish(original: &[Vec<f64>], basis: &[usize], ncols: usize) -> Option<Vec<f64>> {
    let k = basis.len();
    if k != original.len() {
        // Redundant rows were dropped; pick the rows of maximal rank greedily.
        return polish_subset(original, basis, ncols);
    }
    let mut a = Matrix::zeros(k, k);
    let mut rhs = vec![0.0; k];
    for (i, row) in original.iter().enumerate() {
        for (c, &b) in basis.iter().enumerate() {
            a[(i, c)] = row[b];
        }
        rhs[i] = row[ncols];
    }
    let sol = lu_solve(&a, &rhs).ok()?;
    let mut xs = vec![0.0; ncols];
    for (c, &b) in basis.iter().enumerate() {
        xs[b] = sol[c].max(0.0);
    }
    Some(xs)
}

fn polish_subset(original: &[Vec<f64>], basis: &[usize], ncols: usize) -> Option<Vec<f64>> {
    let k = basis.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for (i, _) in original.iter().enumerate() {
        if chosen.len() == k {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        let rows: Vec<Vector> = trial
            .iter()
            .map(|&r| basis.iter().map(|&b| original[r][b]).collect())
            .collect();
        if super::orthonormalize_with(&rows, 1e-9).is_ok() {
            chosen = trial;
        }
    }
    if chosen.len() != k {
        return None;
    }
    let mut a = Matrix::zeros(k, k);
    let mut rhs = vec![0.0; k];
    for (i, &r) in chosen.iter().enumerate() {
        for (c, &b) in basis.iter().enumerate() {
            a[(i, c)] = original[r][b];
        }
        rhs[i] = original[r][ncols];
    }
    let sol = lu_solve(&a, &rhs).ok()?;
    let mut xs = vec![0.0; ncols];
    for (c, &b) in basis.iter().enumerate() {
        xs[b] = sol[c].max(0.0);
    }
    Some(xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximize_single_bound() {
        let s = solve_lp(&[1.0], &[(vec![1.0], 1.0)]).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.point[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square_vertex() {
        let rows = vec![
            (vec![1.0, 0.0], 1.0),
            (vec![0.0, 1.0], 1.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, -1.0], 0.0),
        ];
        let s = solve_lp(&[1.0, 1.0], &rows).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.point[0] - 1.0).abs() < 1e-12 && (s.point[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // x ≥ 2, x ≤ 3, maximize -x → x = 2
        let rows = vec![(vec![-1.0], -2.0), (vec![1.0], 3.0)];
        let s = solve_lp(&[-1.0], &rows).unwrap();
        assert!((s.point[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = vec![(vec![1.0], 1.0), (vec![-1.0], -2.0)];
        assert!(matches!(solve_lp(&[1.0], &rows), Err(Error::Infeasible)));
        let rows = vec![(vec![-1.0, 0.0], 0.0)];
        assert!(matches!(solve_lp(&[1.0, 0.0], &rows), Err(Error::Unbounded)));
    }

    #[test]
    fn duplicate_rows_are_tolerated() {
        let rows = vec![
            (vec![1.0, 1.0], 1.0),
            (vec![2.0, 2.0], 2.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, -1.0], 0.0),
            (vec![-1.0, -1.0], -0.5),
            (vec![-2.0, -2.0], -1.0),
        ];
        let s = solve_lp(&[1.0, 2.0], &rows).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
    }
}
