//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the linear-algebra, dynamics and measure layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix of size {rows}x{cols} exceeds the supported 64x64 limit")]
    TooLarge { rows: usize, cols: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix is not Hermitian (max asymmetry {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge")]
    NoConvergence,

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid pure state: {0}")]
    InvalidState(String),

    #[error("invalid subsystem index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("environment qubit must start in its ground state")]
    EnvironmentExcited,

    #[error("{what} requires at least {min}, got {got}")]
    TooFew {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("decay-rate pole crossed inside an integration step near t = {0}")]
    PoleCrossed(f64),

    #[error("intermediate map undefined: p(t1) = 1 at t1 = {0}")]
    UndefinedIntermediateMap(f64),

    #[error("time series too short: {0} points (need at least 3)")]
    SeriesTooShort(usize),

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
