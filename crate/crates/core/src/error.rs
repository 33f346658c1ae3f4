use thiserror::Error;

/// Errors produced by the geometry kernels, samplers and scanners.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("points are not in causal order: {0}")]
    Order(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("event is off the quadric (relative residual {0:e})")]
    OffQuadric(f64),

    #[error("event or geodesic leaves the convex wedge of the model space")]
    OutsideWedge,

    #[error("points are not timelike related")]
    NotTimelike,

    #[error("triangle is not realizable: {0}")]
    NotRealizable(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("geodesic oracle failed: {0}")]
    Oracle(String),

    #[error("causal order contains a cycle through element {0}")]
    Cycle(usize),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
