use thiserror::Error;

#[derive(Debug, Error)]
pub enum TfError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shooting bracket does not straddle the critical slope: {0}")]
    Bracket(String),

    #[error("maximum shooting iterations ({0}) exceeded")]
    MaxIterations(usize),

    #[error("step size underflow at x = {0}")]
    StepUnderflow(f64),

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("solver inconsistency: {0}")]
    Inconsistency(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TfError>;
