use thiserror::Error;

/// Violations of the domain types' invariants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unmapped direction token {0:?}")]
    UnmappedDirection(String),
    #[error("place is empty after normalization")]
    EmptyPlace,
    #[error("unknown label kind {0:?}")]
    BadKind(String),
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),
    #[error("confidence {0} outside [0,1]")]
    InvalidConfidence(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Failures from an embedding provider.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error("cannot embed empty text")]
    EmptyInput,
    #[error("embedding provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("embedding has zero norm")]
    ZeroVector,
    #[error("embedding dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}
