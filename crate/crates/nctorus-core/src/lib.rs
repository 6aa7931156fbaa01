//! Finite-support arithmetic in the smooth noncommutative n-torus `A_Θ`.
//!
//! Elements are Fourier polynomials `Σ a_r U^r` over the ordered monomials
//! `U^r = U_1^{r_1} ··· U_n^{r_n}`, with the relation `U_k U_m = e(Θ_mk) U_m U_k`
//! where `e(x) = exp(2πix)`. Products, adjoints, traces and derivations are exact
//! up to floating-point roundoff.

mod element;
mod error;
mod theta;

pub mod json;

pub use element::{
    box_indices, tensor_embed, tensor_embed_with, MultiIndex, TermRecord, TorusElement, CANONICAL_EPS,
    COCYCLE_CONVENTION,
};
pub use error::TorusError;
pub use theta::{product_theta, turns_to_phase, ThetaMatrix};

pub use num_complex::Complex64;
