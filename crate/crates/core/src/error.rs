use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("node {0} is not an interior node")]
    BoundaryNode(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("singular linear system at pivot {0}")]
    Singular(usize),

    #[error("eigen iteration failed: {0}")]
    Eigen(String),

    #[error("sign violation: {0}")]
    SignViolation(String),

    #[error("shooting failed: {0}")]
    Shooting(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
