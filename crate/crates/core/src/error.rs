use thiserror::Error;

/// Errors shared across the whole library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e} vs scale {scale:.3e})")]
    NotHermitian { deviation: f64, scale: f64 },

    #[error("operator is not positive semi-definite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support condition violated: supp of the first operator is not contained in supp of the second")]
    Support,

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("objective returned a non-finite value at t = {t}")]
    Objective { t: f64 },

    #[error("eigendecomposition did not converge (dim {dim}, fingerprint {fingerprint:#018x})")]
    EigenFailure { dim: usize, fingerprint: u64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
