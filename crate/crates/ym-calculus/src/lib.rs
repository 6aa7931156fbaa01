//! Connections, curvature and the Yang-Mills functional on modules `p A_Θ^q` over
//! noncommutative tori.
//!
//! A connection is stored through its potentials, `∇_j = δ_j + A_j`. All values use the
//! extended trace `τ_q = τ ⊗ Tr`, so `YM(∇) = Σ_{i<j} τ_q(Θ_ij* Θ_ij)`.

mod connection;
mod constants;
mod curvature;
mod error;
mod matrix;
mod minimize;
mod product;

pub use connection::{Connection, ConnectionSpec, InvariantDefects, Perturbation, Projection, TOL_IDEM};
pub use constants::{dixmier_torus_constant, gamma, gamma_constants, gamma_ratio};
pub use curvature::{
    check_compatibility, critical_report, curvature, directional_derivative, is_critical, sample_radius, ym_gradient,
    ym_value, CompatibilityReport, CriticalReport, Curvature, SAMPLE_TERMS,
};
pub use error::YmError;
pub use matrix::{kron, kron_with, TorusMatrix};
pub use minimize::{minimize, minimize_with, DescentOptions, DescentResult, StepRule, SUPPORT_MARGIN};
pub use product::{
    additivity_report, critical_splitting_check, mixed_curvature_max, product_connection, subadditivity_check,
    AdditivityReport, SplittingReport,
};
