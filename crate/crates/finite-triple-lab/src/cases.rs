use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::TripleError;
use crate::subspace::CMatrix;
use crate::triple::FiniteTriple;

/// Relative tolerance for "proportional to the identity".
pub const PROPORTIONALITY_TOL: f64 = 1e-10;

/// Classification of `M_p ⊕ M_q` triples by the off-diagonal block `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixCase {
    /// `μ*μ ∝ 1_q` and `μμ* ∝ 1_p` (forces p = q).
    Case1,
    /// Neither product is proportional to the identity.
    Case2,
    /// `q ≤ p`, `μ*μ ∝ 1_q`, `μμ* ≁ 1_p`.
    Case3,
    Unclassified,
}

fn proportional_to_identity(m: &CMatrix) -> bool {
    let k = m.nrows();
    let mean = m.trace() / Complex64::new(k as f64, 0.0);
    let dev = (m - CMatrix::identity(k, k) * mean).norm();
    dev <= PROPORTIONALITY_TOL * m.norm().max(f64::MIN_POSITIVE)
}

/// Classifies `μ ∈ M_{p×q}`. When `q > p` the block is transposed first, so the
/// mirrored configuration lands in the same case.
pub fn classify_matrix_case(mu: &CMatrix) -> Result<MatrixCase, TripleError> {
    if mu.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(TripleError::ZeroMu);
    }
    let mu = if mu.ncols() > mu.nrows() { mu.transpose() } else { mu.clone() };
    let small = proportional_to_identity(&(mu.adjoint() * &mu));
    let large = proportional_to_identity(&(&mu * mu.adjoint()));
    Ok(match (small, large) {
        (true, true) => MatrixCase::Case1,
        (false, false) => MatrixCase::Case2,
        (true, false) => MatrixCase::Case3,
        (false, true) => MatrixCase::Unclassified,
    })
}

/// Even triple on `C^p ⊕ C^q` for the algebra `M_p ⊕ M_q` acting block-diagonally, with
/// `D = [[0, μ], [μ*, 0]]` and `γ = diag(1_p, −1_q)`.
pub fn matrix_case_triple(mu: &CMatrix) -> Result<FiniteTriple, TripleError> {
    let (p, q) = mu.shape();
    if p == 0 || q == 0 {
        return Err(TripleError::ShapeMismatch("mu must be nonempty".into()));
    }
    if mu.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(TripleError::ZeroMu);
    }
    let n = p + q;
    let one = Complex64::new(1.0, 0.0);
    let mut basis = Vec::with_capacity(p * p + q * q);
    for (offset, size) in [(0, p), (p, q)] {
        for i in 0..size {
            for j in 0..size {
                let mut e = CMatrix::zeros(n, n);
                e[(offset + i, offset + j)] = one;
                basis.push(e);
            }
        }
    }
    let mut d = CMatrix::zeros(n, n);
    d.view_mut((0, p), (p, q)).copy_from(mu);
    d.view_mut((p, 0), (q, p)).copy_from(&mu.adjoint());
    let gamma = CMatrix::from_fn(n, n, |i, j| match (i == j, i < p) {
        (true, true) => one,
        (true, false) => -one,
        _ => Complex64::new(0.0, 0.0),
    });
    FiniteTriple::new(basis, d, Some(gamma))
}
