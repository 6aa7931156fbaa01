//! Connes differential forms of finite matrix spectral triples and their products.
//!
//! Operators live in `B(C^d)` and subspaces are represented by Frobenius-orthonormal bases.
//! Rank decisions use singular values with a relative threshold.

mod cases;
mod error;
mod forms;
mod product;
mod subspace;
mod triple;

pub use cases::{classify_matrix_case, matrix_case_triple, MatrixCase, PROPORTIONALITY_TOL};
pub use error::TripleError;
pub use forms::{
    differentials, form_report, form_report_weighted, junk_space, omega1_space, pi_omega2_space, FormReport,
    TraceWeight,
};
pub use product::{
    decomposition_check, double_odd, hypothesis_check, orthogonality_check, product_triple,
    unitary_equivalence_defect, DecompositionReport, FactorDims, HypothesisDims, HypothesisReport,
    OrthogonalityReport,
};
pub use subspace::{unvectorize, vectorize, CMatrix, OperatorSubspace, EQUALITY_TOL, RANK_TOL};
pub use triple::{frobenius, kron, matrix_to_pairs, pairs_to_matrix, FiniteTriple, TripleSpec, STRUCTURE_TOL};
