use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error in {input:?} at byte {pos}: {msg}")]
    Parse { input: String, pos: usize, msg: String },

    #[error("arity mismatch: expected {expected} coordinates, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("chart mismatch: {0} vs {1} coordinates")]
    ChartMismatch(usize, usize),

    #[error("fiber dimension mismatch: {0} vs {1}")]
    FiberMismatch(usize, usize),

    #[error("degree {degree} out of range for a chart of dimension {dim}")]
    Degree { degree: usize, dim: usize },

    #[error("invalid chart: {0}")]
    Chart(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid Lie algebra specification: {0}")]
    LieSpec(String),

    #[error("Jacobi identity fails on basis triples {0:?}")]
    Jacobi(Vec<(usize, usize, usize)>),

    #[error("matrix is not invertible over the fraction field")]
    Singular,

    #[error("inverse is not polynomial (determinant {0} is not a nonzero constant); rescale the input so the determinant is constant")]
    NonPolynomialInverse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
