use std::path::PathBuf;

use finite_triple_lab::TripleError;
use nctorus_core::TorusError;
use thiserror::Error;
use ym_calculus::YmError;

use crate::validate::Diagnostic;

#[derive(Debug, Error)]
pub enum NcymError {
    #[error("invalid config: {}", summarize(.0))]
    ConfigInvalid(Vec<Diagnostic>),
    #[error("cannot decode config: {0}")]
    Decode(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Ym(#[from] YmError),
    #[error(transparent)]
    Triple(#[from] TripleError),
}

impl NcymError {
    /// Input errors are the config's fault; the rest come from the computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, NcymError::ConfigInvalid(_) | NcymError::Decode(_) | NcymError::Io { .. })
    }
}

fn summarize(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| format!("{} {}", d.path, d.message)).collect::<Vec<_>>().join("; ")
}
