//! Batch runner for the torus and finite-triple experiments.
//!
//! A config is a JSON document `{"kind", "payload", "output_path"?}` checked against the
//! shipped schema; [`run`] dispatches on `kind` and returns a self-describing [`Report`].

mod config;
mod error;
mod run;
mod validate;

pub use config::*;
pub use error::NcymError;
pub use run::{run, Conventions, Report, DEFECT_TOL, MIXED_CURVATURE_TOL, SUBADDITIVITY_TOL, UNITARY_TOL, VERSION};
pub use validate::{validate, Diagnostic, Severity, SCHEMA};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const INPUT_ERROR: u8 = 1;
    pub const VERDICT_FAILED: u8 = 2;
}
