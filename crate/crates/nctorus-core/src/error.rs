use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorusError {
    #[error("deformation matrices differ between operands")]
    ThetaMismatch,
    #[error("derivation index {index} out of range for a {n}-torus")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid deformation matrix: {0}")]
    InvalidTheta(String),
    #[error("multi-index {index:?} has length {got}, expected {expected}")]
    IndexLength { index: Vec<i32>, got: usize, expected: usize },
    #[error("non-finite coefficient at {0:?}")]
    NonFinite(Vec<i32>),
}
