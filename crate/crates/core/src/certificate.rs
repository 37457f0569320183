//! John decompositions: contact points, weights, and their verification.
//!
//! A certificate consists of unit vectors `u_i` and positive weights `c_i`
//! with `∑ c_i u_i = 0` and `∑ c_i u_i ⊗ u_i = I`. Together with the unit ball
//! being inscribed, it proves the unit ball is the maximal-volume ellipsoid.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, solve_nnls, Matrix, SymMatrix, Vector};
use crate::mvie::{self, Ellipsoid};
use crate::polytope::{Halfspace, HalfspacePolytope, JohnFormPolytope};
use crate::report::BoundReport;
use crate::rng::unit_vector;
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohnCertificate {
    pub contacts: Vec<Vector>,
    pub weights: Vector,
    /// `‖∑ c_i u_i‖`
    pub residual_a: f64,
    /// `‖∑ c_i u_i ⊗ u_i − I‖_F`
    pub residual_b: f64,
    /// `|∑ c_i − n|`
    pub trace_gap: f64,
}

/// Recomputes `(residual_a, residual_b, trace_gap)` from the raw data.
pub fn residuals(contacts: &[Vector], weights: &[f64], n: usize) -> (f64, f64, f64) {
    let mut sum = vec![0.0; n];
    for (u, c) in contacts.iter().zip(weights) {
        linalg::axpy(&mut sum, *c, u);
    }
    let inertia = SymMatrix::weighted_outer_sum(contacts, weights, n);
    let gap = inertia.to_dense().sub(&Matrix::identity(n)).frobenius();
    let trace = weights.iter().sum::<f64>() - n as f64;
    (norm(&sum), gap, trace.abs())
}

impl JohnCertificate {
    pub fn from_parts(contacts: Vec<Vector>, weights: Vector) -> Result<Self> {
        let n = contacts.first().map(|u| u.len()).ok_or(Error::EmptyInput)?;
        if contacts.len() != weights.len() {
            return Err(Error::DimMismatch { expected: contacts.len(), got: weights.len() });
        }
        if let Some(u) = contacts.iter().find(|u| u.len() != n) {
            return Err(Error::DimMismatch { expected: n, got: u.len() });
        }
        let (residual_a, residual_b, trace_gap) = residuals(&contacts, &weights, n);
        Ok(JohnCertificate { contacts, weights, residual_a, residual_b, trace_gap })
    }

    pub fn dim(&self) -> usize {
        self.contacts.first().map_or(0, |u| u.len())
    }

    pub fn len(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    pub fn is_verified(&self, tol: f64) -> bool {
        verify(self, tol).iter().all(|r| r.pass)
    }

    /// True when the contact set is closed under negation (within `tol`).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.contacts.iter().all(|u| {
            self.contacts
                .iter()
                .any(|v| u.iter().zip(v).all(|(a, b)| (a + b).abs() <= tol))
        })
    }

    /// `K = {x : ⟨x, u_i⟩ ≤ 1}` over the contacts.
    pub fn body(&self) -> Result<JohnFormPolytope> {
        let normals = self
            .contacts
            .iter()
            .map(|u| linalg::scale(u, 1.0 / norm(u)))
            .collect();
        JohnFormPolytope::from_unit_normals(normals)
    }
}

/// Touching points of `e` with the rows it is tangent to, expressed in the
/// coordinates where `e` is the unit ball and normalized to unit length. When
/// `e` is the unit ball these are the normalized row normals themselves.
///
/// A row is a contact when its margin, relative to the slack of the center,
/// is at most `tol` in absolute value.
pub fn find_contacts(rows: &[Halfspace], e: &Ellipsoid, tol: f64) -> Result<Vec<Vector>> {
    let root = e.shape_root();
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if r.a.len() != e.dim() {
            return Err(Error::DimMismatch { expected: e.dim(), got: r.a.len() });
        }
        let center_slack = r.slack(&e.center);
        let margin = mvie::tangency_margin(e, r);
        let relative = if center_slack > 0.0 { margin / center_slack } else { margin };
        if relative < -tol || center_slack <= 0.0 {
            return Err(Error::NotInscribed { row: i, margin });
        }
        if relative.abs() <= tol {
            let z = root.matvec(&r.a);
            let s = norm(&z);
            out.push(z.into_iter().map(|v| v / s).collect());
        }
    }
    Ok(out)
}

/// Design matrix of the John system: n rows for `∑ c_i u_i = 0`, then the
/// upper triangle of `∑ c_i u_i ⊗ u_i = I` with off-diagonal rows scaled by √2
/// so the residual norm equals the Frobenius gap.
fn john_system(contacts: &[Vector], n: usize) -> (Matrix, Vector) {
    let rows = n + n * (n + 1) / 2;
    let mut a = Matrix::zeros(rows, contacts.len());
    let mut b = vec![0.0; rows];
    let s2 = std::f64::consts::SQRT_2;
    for (col, u) in contacts.iter().enumerate() {
        for i in 0..n {
            a[(i, col)] = u[i];
        }
        let mut r = n;
        for i in 0..n {
            for j in i..n {
                let f = if i == j { 1.0 } else { s2 };
                a[(r, col)] = f * u[i] * u[j];
                r += 1;
            }
        }
    }
    let mut r = n;
    for i in 0..n {
        for j in i..n {
            if i == j {
                b[r] = 1.0;
            }
            r += 1;
        }
    }
    (a, b)
}

pub fn solve_weights(contacts: &[Vector]) -> Result<JohnCertificate> {
    solve_weights_with(contacts, &Tolerances::default())
}

/// Nonnegative weights for conditions a and b via NNLS. Weights at or below
/// the floor are dropped together with their contacts.
pub fn solve_weights_with(contacts: &[Vector], tol: &Tolerances) -> Result<JohnCertificate> {
    let n = contacts.first().map(|u| u.len()).ok_or(Error::EmptyInput)?;
    if contacts.len() < n {
        return Err(Error::InvalidInput(format!(
            "need at least {n} contacts, got {}",
            contacts.len()
        )));
    }
    let (a, b) = john_system(contacts, n);
    let c = solve_nnls(&a, &b)?;
    let (kept, weights): (Vec<Vector>, Vector) = contacts
        .iter()
        .zip(&c)
        .filter(|(_, w)| **w > tol.weight_floor)
        .map(|(u, w)| (u.clone(), *w))
        .unzip();
    let cert = if kept.is_empty() {
        let (ra, rb, tg) = residuals(&[], &[], n);
        JohnCertificate { contacts: kept, weights, residual_a: ra, residual_b: rb, trace_gap: tg }
    } else {
        JohnCertificate::from_parts(kept, weights)?
    };
    if cert.residual_a <= tol.certificate && cert.residual_b <= tol.certificate {
        Ok(cert)
    } else {
        Err(Error::NoDecomposition { best: Box::new(cert) })
    }
}

/// Checks conditions a and b, the trace identity `∑ c_i = n`, unit contacts
/// and positive weights, all recomputed from the raw data.
pub fn verify(cert: &JohnCertificate, tol: f64) -> Vec<BoundReport> {
    let n = cert.dim();
    let (ra, rb, tg) = residuals(&cert.contacts, &cert.weights, n);
    let unit_err = cert
        .contacts
        .iter()
        .map(|u| (norm(u) - 1.0).abs())
        .fold(0.0, f64::max);
    let min_weight = cert.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let mut positive = BoundReport::lower("positive_weights", 0.0, min_weight, 0.0);
    positive.pass = min_weight > 0.0 && !cert.weights.is_empty();
    vec![
        BoundReport::upper("condition_a", 0.0, ra, tol),
        BoundReport::upper("condition_b", 0.0, rb, tol),
        BoundReport::upper("trace", 0.0, tg, tol),
        BoundReport::upper("unit_contacts", 0.0, unit_err, tol),
        positive,
    ]
}

/// `(⟨x, y⟩, ∑ c_i ⟨u_i, x⟩⟨u_i, y⟩)`
pub fn inner_product_identity_check(cert: &JohnCertificate, x: &[f64], y: &[f64]) -> (f64, f64) {
    let rhs = cert
        .contacts
        .iter()
        .zip(&cert.weights)
        .map(|(u, c)| c * dot(u, x) * dot(u, y))
        .sum();
    (dot(x, y), rhs)
}

/// Radius of the ball around the origin that contains every body in John
/// position: n in general, √n for origin-symmetric bodies.
pub fn outer_radius_bound(symmetric: bool, n: usize) -> f64 {
    if symmetric {
        (n as f64).sqrt()
    } else {
        n as f64
    }
}

/// MVIE, contacts and weights of an arbitrary polytope. Contacts are expressed
/// in the coordinates where the MVIE is the unit ball.
#[derive(Debug, Clone)]
pub struct Certification {
    pub ellipsoid: Ellipsoid,
    pub certificate: JohnCertificate,
}

pub fn certify(p: &HalfspacePolytope, tol: &Tolerances) -> Result<Certification> {
    let ellipsoid = mvie::solve_mvie_with(p, tol)?.ellipsoid;
    let contacts = find_contacts(p.rows(), &ellipsoid, tol.contact)?;
    let certificate = solve_weights_with(&contacts, tol)?;
    Ok(Certification { ellipsoid, certificate })
}

/// Certificate for a body whose MVIE is expected to be the unit ball.
pub fn certify_john_form(p: &JohnFormPolytope, tol: &Tolerances) -> Result<JohnCertificate> {
    let contacts = find_contacts(p.polytope().rows(), &Ellipsoid::unit_ball(p.dim()), tol.contact)?;
    solve_weights_with(&contacts, tol)
}

/// Samples `m` uniform unit normals and keeps the body `{⟨u_i, x⟩ ≤ 1}` if the
/// contacts admit John weights, so that its MVIE is the unit ball. `None`
/// when the sample carries no decomposition.
pub fn random_certified_body<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    tol: &Tolerances,
) -> Option<(JohnFormPolytope, JohnCertificate)> {
    let normals: Vec<Vector> = (0..m).map(|_| unit_vector(rng, n)).collect();
    let cert = solve_weights_with(&normals, tol).ok()?;
    let body = JohnFormPolytope::from_unit_normals(normals).ok()?;
    Some((body, cert))
}

/// Smallest sample size that generically supports a decomposition:
/// `n(n+3)/2`, the number of scalar equations in conditions a and b.
pub fn min_random_contacts(n: usize) -> usize {
    n * (n + 3) / 2
}
