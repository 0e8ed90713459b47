use thiserror::Error;

/// Errors raised by the geometry and numerics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet operands disagree: {0}")]
    JetMismatch(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("derivative of order {k} requested from a jet of order {order}")]
    InsufficientOrder { k: usize, order: usize },
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is within {cutoff:e} of the boundary (min facet value {value:e})")]
    NearBoundary { value: f64, cutoff: f64 },
    #[error("non-admissible potential: {0}")]
    NonAdmissible(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("the origin is excluded")]
    OriginExcluded,
    #[error("degenerate potential: {0}")]
    DegeneratePotential(String),
    #[error("singular metric: {0}")]
    SingularMetric(String),
    #[error("accuracy not reached: {0}")]
    Accuracy(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
