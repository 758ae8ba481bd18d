use thiserror::Error;

/// Errors raised by the numerical kernels and model evaluators.
///
/// Magnitudes are reported as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian/symmetric (deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("wrong parameter-space dimension: expected {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("wrong number of operators: expected {expected}, found {found}")]
    WrongArity { expected: usize, found: usize },

    #[error("spectral gap closes (gap {gap:e} <= threshold {threshold:e})")]
    GapClosing { gap: f64, threshold: f64 },

    #[error("invalid occupation: {n_occ} occupied states in dimension {dim}")]
    InvalidOccupation { n_occ: usize, dim: usize },

    #[error("invalid spin quantum number {0} (2l must be a nonnegative integer)")]
    InvalidSpin(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is degenerate (det {det:e} below threshold {threshold:e})")]
    Degenerate { det: f64, threshold: f64 },

    #[error("operator set is empty")]
    EmptyOperatorSet,

    #[error("finite-difference step {0:e} outside [1e-7, 1e-3]")]
    InvalidStep(f64),

    #[error("invalid count {0}")]
    InvalidCount(usize),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
