use thiserror::Error;

use crate::certificate::JohnCertificate;
use crate::mvie::Ellipsoid;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    InvalidMatrix,
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("vectors are linearly dependent (column {column})")]
    RankDeficient { column: usize },
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("dimension {0} is too large for this constructor")]
    TooLarge(usize),
    #[error("center is not strictly interior (row {row} has slack {slack:e})")]
    NotInterior { row: usize, slack: f64 },
    #[error("solver did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        best: Box<Ellipsoid>,
    },
    #[error("ellipsoid is not inscribed (row {row} has margin {margin:e})")]
    NotInscribed { row: usize, margin: f64 },
    #[error("no John decomposition (residual_a {:e}, residual_b {:e})", .best.residual_a, .best.residual_b)]
    NoDecomposition { best: Box<JohnCertificate> },
    #[error("empty input")]
    EmptyInput,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("iteration limit reached in {0}")]
    IterationLimit(&'static str),
    #[error("a verified John certificate is required")]
    CertificateRequired,
}

pub type Result<T> = std::result::Result<T, Error>;
