use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the supported bound {max}")]
    DimensionBound { dim: usize, max: usize },

    #[error("profiles of different kinds or grids cannot be compared")]
    KindMismatch,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    StabilityBound { dt: f64, bound: f64 },

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("integer overflow while iterating the shift map")]
    Overflow,
}
