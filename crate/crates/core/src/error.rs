use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("Jacobi iteration did not converge")]
    NoConvergence,
    #[error("need at least two observations, have {0}")]
    InsufficientObservations(usize),
    #[error("degenerate observation geometry (relative eigen-gap {0:e})")]
    DegenerateGeometry(f64),
    #[error("constant attitude has not been solved yet")]
    NotReady,
    #[error("innovation covariance is singular (condition number {0:e})")]
    SingularUpdate(f64),
}
