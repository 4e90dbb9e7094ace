use thiserror::Error;

/// Errors produced by state construction, operator assembly and evaluation.
#[derive(Debug, Error)]
pub enum QbError {
    #[error("vector ({x}, {y}, {z}) is not unit length: |v| = {norm}")]
    NonUnitVector { x: f64, y: f64, z: f64, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized: {detail}")]
    InvalidState { detail: String },

    #[error("particle count {n} out of range: {detail}")]
    ParticleCount { n: usize, detail: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing correlator assignment: {0}")]
    MissingAssignment(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QbError>;
