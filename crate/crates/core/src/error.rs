use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not a projection: {reason}")]
    NotAProjection { reason: String },

    #[error("matrix is not unitary (||U*U - I||_F = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("rank k = {k} must satisfy 1 <= k < n = {n}")]
    BadRank { k: usize, n: usize },

    #[error("index {index} out of range for dimension {n}")]
    BadIndex { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("superoperator is singular (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("map is not Hermiticity-preserving")]
    NotHermiticityPreserving,

    #[error(
        "map is not of Wigner form (direct residual {direct:e}, transpose residual {transpose:e})"
    )]
    NotWignerLike { direct: f64, transpose: f64 },

    #[error("image of E_11 is not rank one (second eigenvalue magnitude {second:e})")]
    DegenerateImage { second: f64 },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("unsupported vectorization convention {0:?}")]
    Convention(String),
}

pub type Result<T> = std::result::Result<T, Error>;
