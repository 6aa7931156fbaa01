use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TripleError {
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("first factor has no grading and automatic doubling is disabled")]
    MissingGrading,
    #[error("triple already carries a grading")]
    AlreadyEven,
    #[error("the off-diagonal block mu is zero")]
    ZeroMu,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}
