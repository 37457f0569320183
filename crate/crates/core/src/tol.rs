//! Numerical tolerances shared by every solver.

use serde::{Deserialize, Serialize};

/// Tolerance record. Every solver reads its thresholds from here; the CLI
/// may override individual fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative Frobenius error allowed by `eig_sym` and `cholesky`.
    pub reconstruction: f64,
    /// Pairwise inner products of a frame must be within this of δ_jl.
    pub orthonormal: f64,
    /// Relative norm below which a vector is considered dependent.
    pub rank: f64,
    /// Primal feasibility tolerance of the LP solver.
    pub lp_feasibility: f64,
    /// Pivot tolerance of the LP solver.
    pub lp_pivot: f64,
    /// KKT residual target of NNLS.
    pub nnls_kkt: f64,
    /// Barrier parameter at which the log-det solver stops.
    pub barrier_mu: f64,
    /// Newton decrement at which a centering step stops.
    pub newton_decrement: f64,
    /// Total Newton iteration cap of the log-det solver.
    pub max_newton_iterations: usize,
    /// Rows with |margin| at most this are contacts.
    pub contact: f64,
    /// Certificate residual threshold for `solve_weights`.
    pub certificate: f64,
    /// Weights at or below this are dropped from a certificate.
    pub weight_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            reconstruction: 1e-10,
            orthonormal: 1e-12,
            rank: 1e-10,
            lp_feasibility: 1e-9,
            lp_pivot: 1e-11,
            nnls_kkt: 1e-9,
            barrier_mu: 1e-10,
            newton_decrement: 1e-10,
            max_newton_iterations: 500,
            contact: 1e-6,
            certificate: 1e-7,
            weight_floor: 1e-10,
        }
    }
}
