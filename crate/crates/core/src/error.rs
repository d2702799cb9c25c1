use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (deviation {deviation:e} at ({row}, {col}))")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("operator has {positives} positive and {negatives} negative eigenvalues, spin dimension {spin_dim} allows at most {spin_dim} of each")]
    NotMember {
        positives: usize,
        negatives: usize,
        spin_dim: usize,
    },

    #[error("operator has numerical rank {rank}, expected at most one")]
    NotRankOne { rank: usize },

    #[error("operator is not positive semi-definite")]
    NotPositive,

    #[error("indefinite form is singular")]
    SingularForm,

    #[error("waves are linearly dependent at index {index}")]
    LinearlyDependent { index: usize },

    #[error("value {value} outside of [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("vector is not normalized: |u| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("index {index} out of range for support of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown surface-layer kernel `{0}`")]
    UnknownKernel(String),

    #[error("eigenvalue solver failed to converge")]
    EigenFailure,
}
