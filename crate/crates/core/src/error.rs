use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the mathematical function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its target (root bracketing,
    /// quadrature subdivision cap, shift search).
    #[error("computation failed: {0}")]
    Computation(String),

    /// A query beyond what has been computed, e.g. a counting-function value
    /// above the trusted part of a spectrum.
    #[error("out of range: {0}")]
    Range(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error("eigensolver failed: {0}")]
    Solver(String),

    /// A certified inequality did not hold numerically.
    #[error("certificate violated: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
