use serde::{Deserialize, Serialize};

/// Outcome of comparing a measured quantity with a closed-form bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    /// Signed distance to the bound; negative means the bound is violated.
    pub slack: f64,
    pub pass: bool,
}

impl BoundReport {
    /// `measured ≤ bound + tol`
    pub fn upper(name: impl Into<String>, bound: f64, measured: f64, tol: f64) -> Self {
        let slack = bound - measured;
        BoundReport {
            name: name.into(),
            bound,
            measured,
            slack,
            pass: slack >= -tol,
        }
    }

    /// `measured ≥ bound − tol`
    pub fn lower(name: impl Into<String>, bound: f64, measured: f64, tol: f64) -> Self {
        let slack = measured - bound;
        BoundReport {
            name: name.into(),
            bound,
            measured,
            slack,
            pass: slack >= -tol,
        }
    }
}

pub fn all_pass(reports: &[BoundReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
