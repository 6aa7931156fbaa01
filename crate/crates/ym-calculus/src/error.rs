use nctorus_core::TorusError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum YmError {
    #[error("invalid connection: {0}")]
    InvalidConnection(String),
    #[error("invalid projection: {0}")]
    InvalidProjection(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("Yang-Mills value became non-finite at iteration {iteration}")]
    NonFiniteValue { iteration: usize },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("operation requires a free module or a constant projection")]
    UnsupportedProjection,
    #[error(transparent)]
    Torus(#[from] TorusError),
}
