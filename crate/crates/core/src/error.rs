use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("axis {axis} out of range for a {dims}-dimensional field")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("need at least {needed} nodes along axis {axis}, found {found}")]
    TooFewNodes { axis: usize, needed: usize, found: usize },

    #[error("query point {0} lies outside the grid")]
    OutOfBounds(f64),

    #[error("restriction needs an even number of cells, found {0}")]
    OddCellCount(usize),

    #[error("non-finite value in field at node {0}")]
    NonFinite(usize),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("bowl table misses the residual target: achieved {achieved:.3e} > {target:.1e}")]
    ResidualTarget { achieved: f64, target: f64 },

    #[error("invalid boundary policy: {0}")]
    Policy(String),

    #[error("time step {dt:.3e} exceeds the stability limit {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("solver aborted at step {step} (t = {t}): {reason}")]
    SolverAbort { step: usize, t: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
