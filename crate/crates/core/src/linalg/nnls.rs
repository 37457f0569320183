//! Lawson–Hanson active-set nonnegative least squares.

use super::{all_finite, lstsq, norm, Matrix, Vector};
use crate::error::{Error, Result};

/// Minimizes `‖A c − b‖₂` over `c ≥ 0`.
pub fn solve_nnls(a: &Matrix, b: &[f64]) -> Result<Vector> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimMismatch { expected: m, got: b.len() });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !a.is_finite() || !all_finite(b) {
        return Err(Error::InvalidMatrix);
    }

    let scale = a.frobenius() * norm(b).max(1.0);
    let grad_tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    // Columns that were found dependent on the passive set; retried after
    // the passive set changes.
    let mut blocked = vec![false; n];

    let max_outer = 3 * n + 30;
    for _ in 0..max_outer {
        let w = gradient(a, b, &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !blocked[j] && w[j] > grad_tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(j) = candidate else {
            break;
        };
        passive[j] = true;

        let mut changed_set = false;
        for _ in 0..(3 * n + 30) {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let sub = Matrix::from_columns(&idx.iter().map(|&i| a.column(i)).collect::<Vec<_>>());
            let z = match lstsq(&sub, b, 1e-12) {
                Ok(z) => z,
                Err(_) => {
                    // New column is dependent on the current passive set.
                    passive[j] = false;
                    blocked[j] = true;
                    break;
                }
            };
            if idx.iter().zip(&z).all(|(_, &zi)| zi > 0.0) {
                for (&i, &zi) in idx.iter().zip(&z) {
                    x[i] = zi;
                }
                break;
            }
            if idx.len() == 1 && idx[0] == j && z[0] <= 0.0 {
                // The entering column cannot move off zero.
                passive[j] = false;
                blocked[j] = true;
                break;
            }
            let mut alpha = f64::INFINITY;
            for (&i, &zi) in idx.iter().zip(&z) {
                if zi <= 0.0 {
                    let a_i = x[i] / (x[i] - zi);
                    if a_i < alpha {
                        alpha = a_i;
                    }
                }
            }
            for (&i, &zi) in idx.iter().zip(&z) {
                x[i] += alpha * (zi - x[i]);
            }
            for &i in &idx {
                if x[i] <= 1e-15 * (1.0 + x.iter().fold(0.0_f64, |acc, v| acc.max(*v))) {
                    x[i] = 0.0;
                    passive[i] = false;
                    changed_set = true;
                }
            }
        }
        if changed_set || !blocked[j] {
            for (bl, p) in blocked.iter_mut().zip(&passive) {
                if !*p {
                    *bl = false;
                }
            }
        }
    }
    Ok(x)
}

fn gradient(a: &Matrix, b: &[f64], x: &[f64]) -> Vector {
    let ax = a.matvec(x);
    let r: Vector = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
    a.tr_matvec(&r)
}

/// Largest violation of the NNLS optimality conditions at `x`:
/// `x ≥ 0`, `w = Aᵀ(b − Ax) ≤ 0`, and `w_j = 0` wherever `x_j > 0`.
pub fn kkt_residual(a: &Matrix, b: &[f64], x: &[f64]) -> f64 {
    let w = gradient(a, b, x);
    let mut worst: f64 = 0.0;
    for (xj, wj) in x.iter().zip(&w) {
        worst = worst.max((-xj).max(0.0));
        if *xj > 0.0 {
            worst = worst.max(wj.abs());
        } else {
            worst = worst.max(wj.max(0.0));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_cases() {
        let a = Matrix::identity(2);
        let c = solve_nnls(&a, &[1.0, 1.0]).unwrap();
        assert_eq!(c, vec![1.0, 1.0]);
        let c = solve_nnls(&a, &[1.0, -1.0]).unwrap();
        assert_eq!(c, vec![1.0, 0.0]);
    }

    #[test]
    fn square_john_system() {
        // columns ±e1, ±e2; rows: condition a (2), condition b upper triangle (3)
        let s2 = std::f64::consts::SQRT_2;
        let cols = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 1.0],
            vec![0.0, -1.0, 0.0, 0.0, 1.0],
        ];
        let a = Matrix::from_columns(&cols);
        let b = [0.0, 0.0, 1.0, 0.0 * s2, 1.0];
        let c = solve_nnls(&a, &b).unwrap();
        for ci in &c {
            assert!((ci - 0.5).abs() < 1e-14, "{c:?}");
        }
        assert!(kkt_residual(&a, &b, &c) < 1e-12);
    }

    #[test]
    fn dependent_columns_are_handled() {
        let a = Matrix::from_columns(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let b = [3.0, 1.0];
        let c = solve_nnls(&a, &b).unwrap();
        let r = a.matvec(&c);
        assert!((r[0] - 3.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12);
        assert!(c.iter().all(|v| *v >= 0.0));
        assert!(kkt_residual(&a, &b, &c) < 1e-9);
    }

    #[test]
    fn rejects_nan() {
        let a = Matrix::identity(2);
        assert!(solve_nnls(&a, &[f64::NAN, 0.0]).is_err());
    }
}
