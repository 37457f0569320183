//! Maximal-volume inscribed ellipsoids of H-polytopes, John decompositions,
//! and extremal k-dimensional inscribed balls and ellipsoids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod barrier;
pub mod certificate;
pub mod error;
pub mod jung;
pub mod kflat;
pub mod linalg;
pub mod mvie;
pub mod polytope;
pub mod report;
pub mod rng;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
