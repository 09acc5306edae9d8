use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix: |det| = {det:e} below threshold {threshold:e}")]
    Singular { det: f64, threshold: f64 },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} out of range: {value} (allowed {allowed})")]
    OutOfRange {
        what: &'static str,
        value: i64,
        allowed: &'static str,
    },

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("origin is not strictly interior (margin {margin:e})")]
    OriginNotInterior { margin: f64 },

    #[error("centroid is not at the origin (offset {offset:e})")]
    CentroidNotAtOrigin { offset: f64 },

    #[error("degenerate mesh cell {cell} (volume {volume:e})")]
    DegenerateCell { cell: usize, volume: f64 },

    #[error("mesh budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("insufficient unknowns: requested {requested} eigenvalues from {available} unknowns")]
    InsufficientUnknowns { requested: usize, available: usize },

    #[error("root bracketing failed: {0}")]
    RootBracket(String),

    #[error("invalid boundary condition: {0}")]
    InvalidBoundaryCondition(String),

    #[error("no symmetry group registered for {0}")]
    UnregisteredSymmetry(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
