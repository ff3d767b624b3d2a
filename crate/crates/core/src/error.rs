use ndarray::Array1;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {0} is not covered by any group")]
    UncoveredCoordinate(usize),

    #[error("group {group} contains index {index} which is out of range for p = {p}")]
    IndexOutOfRange { group: usize, index: usize, p: usize },

    #[error("group {group} contains index {index} more than once")]
    DuplicateIndex { group: usize, index: usize },

    #[error("dimension mismatch ({what}): expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("layout has overlapping groups (R = {0}); use eval_penalty instead")]
    OverlappingLayout(usize),

    #[error("penalty evaluation did not converge after {iterations} iterations (gap {gap:.3e})")]
    PenaltyNotConverged {
        iterations: usize,
        gap: f64,
        best: Array1<f64>,
        residual: f64,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective {
        iteration: usize,
        snapshot: Array1<f64>,
    },

    #[error("labels must be ±1 (found {value} at row {row})")]
    InvalidLabel { row: usize, value: f64 },

    #[error("covariance is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("E[f(g)g] = {0:.3e} is not positive")]
    NonPositiveCorrelation(f64),

    #[error("x* must have unit norm for classification models (norm {0:.6})")]
    NotUnitNorm(f64),

    #[error("enumeration of {0:.3e} candidate supports exceeds the guard of 1e7; use a smaller instance")]
    EnumerationTooLarge(f64),

    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
