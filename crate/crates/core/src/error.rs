use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {limit:e}")]
    NotHermitian { asymmetry: f64, limit: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {lambda_min:e}")]
    NotPsd { lambda_min: f64 },

    #[error("Jacobi iteration did not converge: off-diagonal norm {off_diagonal:e} after {sweeps} sweeps")]
    Convergence { off_diagonal: f64, sweeps: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("precondition for `{check}` violated: {reason}")]
    Precondition { check: String, reason: String },

    #[error("invalid field `{field}`: {reason}")]
    Parse { field: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
