use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The node spectrum sits on the imaginary axis, so no finite coupling
    /// strength changes the sign of the stability margin.
    #[error("marginal node: |max real part of node spectrum| = {value:e} is within {tol:e} of zero")]
    MarginalNode { value: f64, tol: f64 },

    /// Zero is in the coupling Laplacian spectrum; along its eigenvector the
    /// coupling term vanishes identically.
    #[error("not stabilizable by coupling alone: the coupling Laplacian spectrum contains zero")]
    NotStabilizable,

    #[error("not an equilibrium of the node dynamics: residual {0:e}")]
    NotAnEquilibrium(f64),

    #[error("no solution: matrix is not Hurwitz (max eigenvalue real part {0:e})")]
    NotHurwitz(f64),

    #[error("step size underflow at t = {t}: problem too stiff for the requested tolerance")]
    StepUnderflow { t: f64 },

    #[error("exhausted {0} attempts while generating a random graph")]
    ExhaustedAttempts(usize),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
