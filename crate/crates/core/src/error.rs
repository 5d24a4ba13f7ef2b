//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient vector is identically zero")]
    ZeroVector,

    #[error("non-finite coefficient at index {index}")]
    InvalidValue { index: usize },

    #[error("need at least 2 coefficients, got {0}")]
    TooFewCoefficients(usize),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("loaded state violates normalization: |Σ c² − 1| = {deviation:.3e}")]
    InvalidState { deviation: f64 },

    #[error("current operator on n_max = 0 is identically zero")]
    DegenerateOperator,

    #[error("time grid needs at least 2 samples, got {0}")]
    InvalidGrid(usize),

    #[error("coefficient vectors differ in n_max: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error(
        "eigensolver stopped before reaching tolerance: best p_min = {}, residual = {:.3e}",
        best.p_min, best.residual_norm
    )]
    ConvergenceFailure {
        best: Box<crate::optimizer::MinimizationResult>,
    },

    #[error("stride k = {k} is too large for a series of {len} samples")]
    StrideTooLarge { k: usize, len: usize },

    #[error("series is degenerate: zero curve length at stride k = {k}")]
    DegenerateSeries { k: usize },

    #[error("only {got} usable bins in the fit window; need at least {need}")]
    InsufficientRange { got: usize, need: usize },

    #[error(
        "dense kernel at n_max = {n_max} needs {required_mib} MiB (cap {cap_mib} MiB); \
         use the matrix-free minimizer instead"
    )]
    KernelTooLarge {
        n_max: usize,
        required_mib: usize,
        cap_mib: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
