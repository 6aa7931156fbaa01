use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::TripleError;
use crate::forms::{junk_space, omega1_space, pi_omega2_space, TraceWeight};
use crate::subspace::{CMatrix, OperatorSubspace};
use crate::triple::{kron, FiniteTriple};

fn pauli(entries: [f64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &entries.map(|x| Complex64::new(x, 0.0)))
}

/// Even triple `(A ⊗ 1, H ⊗ C², D ⊗ σ₁, 1 ⊗ σ₃)` built from an odd one.
pub fn double_odd(t: &FiniteTriple) -> Result<FiniteTriple, TripleError> {
    if t.is_even() {
        return Err(TripleError::AlreadyEven);
    }
    let sigma1 = pauli([0.0, 1.0, 1.0, 0.0]);
    let sigma3 = pauli([1.0, 0.0, 0.0, -1.0]);
    let one2 = CMatrix::identity(2, 2);
    let one = CMatrix::identity(t.dim_h(), t.dim_h());
    let basis = t.algebra_basis().iter().map(|a| kron(a, &one2)).collect();
    FiniteTriple::new(basis, kron(t.d(), &sigma1), Some(kron(&one, &sigma3)))
}

fn graded_first(t1: &FiniteTriple, auto_double: bool) -> Result<FiniteTriple, TripleError> {
    match (t1.is_even(), auto_double) {
        (true, _) => Ok(t1.clone()),
        (false, true) => double_odd(t1),
        (false, false) => Err(TripleError::MissingGrading),
    }
}

/// `(A₁ ⊗ A₂, H₁ ⊗ H₂, D₁ ⊗ 1 + γ₁ ⊗ D₂, γ₁ ⊗ γ₂)`; the grading is dropped when `t2` is odd.
pub fn product_triple(t1: &FiniteTriple, t2: &FiniteTriple, auto_double: bool) -> Result<FiniteTriple, TripleError> {
    let t1 = graded_first(t1, auto_double)?;
    let g1 = t1.gamma().expect("first factor is graded");
    let one2 = CMatrix::identity(t2.dim_h(), t2.dim_h());
    let mut basis = Vec::with_capacity(t1.algebra_basis().len() * t2.algebra_basis().len());
    for a in t1.algebra_basis() {
        for b in t2.algebra_basis() {
            basis.push(kron(a, b));
        }
    }
    let d = kron(t1.d(), &one2) + kron(g1, t2.d());
    let gamma = t2.gamma().map(|g2| kron(g1, g2));
    FiniteTriple::new(basis, d, gamma)
}

/// Largest entry of `U D U* − (D₁ ⊗ γ₂ + 1 ⊗ D₂)` with `U = ½(1⊗1 + γ₁⊗1 + 1⊗γ₂ − γ₁⊗γ₂)`.
pub fn unitary_equivalence_defect(t1: &FiniteTriple, t2: &FiniteTriple) -> Result<f64, TripleError> {
    let g1 = t1.gamma().ok_or(TripleError::MissingGrading)?;
    let g2 = t2.gamma().ok_or(TripleError::MissingGrading)?;
    let one1 = CMatrix::identity(t1.dim_h(), t1.dim_h());
    let one2 = CMatrix::identity(t2.dim_h(), t2.dim_h());
    let u = (kron(&one1, &one2) + kron(g1, &one2) + kron(&one1, g2) - kron(g1, g2)) * Complex64::new(0.5, 0.0);
    let d = kron(t1.d(), &one2) + kron(g1, t2.d());
    let d_prime = kron(t1.d(), g2) + kron(&one1, t2.d());
    let diff = &u * d * u.adjoint() - d_prime;
    Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Subspaces of the product operator space assembled from the factors.
struct FactorPieces {
    omega1_first: OperatorSubspace,
    omega1_second: OperatorSubspace,
    numerator_sum: OperatorSubspace,
    one_one: OperatorSubspace,
    junk_sum: OperatorSubspace,
    dims: FactorDims,
}

/// Dimensions of the factor spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorDims {
    pub algebra1: usize,
    pub algebra2: usize,
    pub omega1_1: usize,
    pub omega1_2: usize,
    pub pi_omega2_1: usize,
    pub pi_omega2_2: usize,
    pub junk1: usize,
    pub junk2: usize,
    pub omega2_1: usize,
    pub omega2_2: usize,
}

fn tensor_span(dim_h: usize, xs: &[CMatrix], ys: &[CMatrix], twist: Option<&CMatrix>) -> OperatorSubspace {
    let mut gens = Vec::with_capacity(xs.len() * ys.len());
    let mut reference: f64 = 0.0;
    for x in xs {
        let x = match twist {
            Some(g) => g * x,
            None => x.clone(),
        };
        for y in ys {
            reference = reference.max(x.norm() * y.norm());
            gens.push(kron(&x, y));
        }
    }
    OperatorSubspace::span_with_reference(dim_h, &gens, reference)
}

/// One-form legs of the first factor sit next to `γ₁` where the product differential puts them:
/// `[D, a⊗b] = [D₁, a]⊗b + γ₁a ⊗ [D₂, b]`.
fn factor_pieces(t1: &FiniteTriple, t2: &FiniteTriple) -> FactorPieces {
    let g1 = t1.gamma().expect("first factor is graded");
    let dim_h = t1.dim_h() * t2.dim_h();
    let a1 = t1.algebra_subspace().basis();
    let a2 = t2.algebra_subspace().basis();
    let o1 = omega1_space(t1);
    let o2 = omega1_space(t2);
    let p1 = pi_omega2_space(t1);
    let p2 = pi_omega2_space(t2);
    let j1 = junk_space(t1);
    let j2 = junk_space(t2);
    let omega1_first = tensor_span(dim_h, &o1.basis(), &a2, None);
    let omega1_second = tensor_span(dim_h, &a1, &o2.basis(), Some(g1));
    let numerator_sum = tensor_span(dim_h, &p1.basis(), &a2, None).sum(&tensor_span(dim_h, &a1, &p2.basis(), None));
    let one_one = tensor_span(dim_h, &o1.basis(), &o2.basis(), Some(g1));
    let junk_sum = tensor_span(dim_h, &j1.basis(), &a2, None).sum(&tensor_span(dim_h, &a1, &j2.basis(), None));
    let dims = FactorDims {
        algebra1: a1.len(),
        algebra2: a2.len(),
        omega1_1: o1.dim(),
        omega1_2: o2.dim(),
        pi_omega2_1: p1.dim(),
        pi_omega2_2: p2.dim(),
        junk1: j1.dim(),
        junk2: j2.dim(),
        omega2_1: p1.dim() - j1.dim(),
        omega2_2: p2.dim() - j2.dim(),
    };
    FactorPieces { omega1_first, omega1_second, numerator_sum, one_one, junk_sum, dims }
}

/// Subspace identities for the forms of a product triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// `Ω¹_D = Ω¹₁ ⊗ A₂ + γ₁A₁ ⊗ Ω¹₂`.
    pub omega1_ok: bool,
    /// `π(Ω²) = (π₁(Ω²) ⊗ A₂ + A₁ ⊗ π₂(Ω²)) + γ₁Ω¹₁ ⊗ Ω¹₂`.
    pub numerator_ok: bool,
    /// `junk = junk₁ ⊗ A₂ + A₁ ⊗ junk₂`.
    pub denominator_ok: bool,
    /// `junk ∩ (γ₁Ω¹₁ ⊗ Ω¹₂) = 0`.
    pub intersection_zero: bool,
    /// Overlap of the two summands of the numerator's first sum; nonzero means the sum is not direct.
    pub numerator_overlap: usize,
}

impl DecompositionReport {
    pub fn all(&self) -> bool {
        self.omega1_ok && self.numerator_ok && self.denominator_ok && self.intersection_zero
    }
}

pub fn decomposition_check(t1: &FiniteTriple, t2: &FiniteTriple) -> Result<DecompositionReport, TripleError> {
    if !t1.is_even() {
        return Err(TripleError::MissingGrading);
    }
    let prod = product_triple(t1, t2, false)?;
    let pieces = factor_pieces(t1, t2);
    let dim_h = prod.dim_h();
    let a1 = t1.algebra_subspace().basis();
    let a2 = t2.algebra_subspace().basis();
    let p1 = tensor_span(dim_h, &pi_omega2_space(t1).basis(), &a2, None);
    let p2 = tensor_span(dim_h, &a1, &pi_omega2_space(t2).basis(), None);
    let junk = junk_space(&prod);
    Ok(DecompositionReport {
        omega1_ok: omega1_space(&prod).equals(&pieces.omega1_first.sum(&pieces.omega1_second)),
        numerator_ok: pi_omega2_space(&prod).equals(&pieces.numerator_sum.sum(&pieces.one_one)),
        denominator_ok: junk.equals(&pieces.junk_sum),
        intersection_zero: junk.intersection_dim(&pieces.one_one) == 0,
        numerator_overlap: p1.intersection_dim(&p2),
    })
}

/// Dimension bookkeeping for the two-form identity of a product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisDims {
    pub factors: FactorDims,
    pub omega2_product: usize,
    pub pi_omega2_product: usize,
    pub junk_product: usize,
    pub numerator_sum: usize,
    pub junk_sum: usize,
    /// `dim(numerator_sum / (numerator_sum ∩ junk_sum))`.
    pub quotient: usize,
    pub omega1_tensor_omega1: usize,
    /// `quotient + dim Ω¹₁ · dim Ω¹₂`.
    pub rhs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub holds: bool,
    pub dims: HypothesisDims,
}

/// Compares `dim Ω²_D` of the product with
/// `dim((π₁Ω² ⊗ A₂ + A₁ ⊗ π₂Ω²) / (junk₁ ⊗ A₂ + A₁ ⊗ junk₂)) + dim Ω¹₁ · dim Ω¹₂`.
pub fn hypothesis_check(t1: &FiniteTriple, t2: &FiniteTriple) -> Result<HypothesisReport, TripleError> {
    if !t1.is_even() {
        return Err(TripleError::MissingGrading);
    }
    let prod = product_triple(t1, t2, false)?;
    let pieces = factor_pieces(t1, t2);
    let pi2 = pi_omega2_space(&prod);
    let junk = junk_space(&prod);
    let quotient = pieces.numerator_sum.dim() - pieces.numerator_sum.intersection_dim(&pieces.junk_sum);
    let oo = pieces.dims.omega1_1 * pieces.dims.omega1_2;
    let dims = HypothesisDims {
        factors: pieces.dims,
        omega2_product: pi2.dim() - junk.dim(),
        pi_omega2_product: pi2.dim(),
        junk_product: junk.dim(),
        numerator_sum: pieces.numerator_sum.dim(),
        junk_sum: pieces.junk_sum.dim(),
        quotient,
        omega1_tensor_omega1: oo,
        rhs: quotient + oo,
    };
    Ok(HypothesisReport { holds: dims.omega2_product == dims.rhs, dims })
}

/// Outcome of [`orthogonality_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub orthogonal: bool,
    /// Largest `|Tr(ξ* η W)| / (‖ξ‖ ‖η‖)` over the samples.
    pub worst: f64,
    pub samples: usize,
}

/// Samples `ξ ∈ γ₁Ω¹₁ ⊗ Ω¹₂` and `η ∈ π₁(Ω²) ⊗ A₂ + A₁ ⊗ π₂(Ω²)` and checks `Tr(ξ* η W) = 0`.
pub fn orthogonality_check(
    t1: &FiniteTriple,
    t2: &FiniteTriple,
    samples: usize,
    seed: u64,
    weight: TraceWeight,
) -> Result<OrthogonalityReport, TripleError> {
    if !t1.is_even() {
        return Err(TripleError::MissingGrading);
    }
    let prod = product_triple(t1, t2, false)?;
    let w = weight.matrix(&prod);
    let pieces = factor_pieces(t1, t2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let xi = pieces.one_one.random_element(&mut rng);
        let eta = pieces.numerator_sum.random_element(&mut rng);
        let denom = xi.norm() * eta.norm() * w.norm().max(1.0);
        if denom == 0.0 {
            continue;
        }
        let value = (xi.adjoint() * &eta * &w).trace().norm() / denom;
        worst = worst.max(value);
    }
    Ok(OrthogonalityReport { orthogonal: worst <= 1e-10, worst, samples })
}
