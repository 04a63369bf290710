use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("entry count {got} does not match shape {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("subsystem dimensions {dims:?} do not multiply to {dim}")]
    InvalidSubsystems { dims: Vec<usize>, dim: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("empty subsystem selection")]
    EmptySelection,

    #[error("invalid prior probabilities: {0}")]
    InvalidPriors(String),

    #[error("average state has no support")]
    ZeroAverageState,

    #[error("POVM effects do not sum to the identity (max deviation {0:e})")]
    IncompletePovm(f64),

    #[error("POVM has {effects} effects for {hypotheses} hypotheses")]
    TooFewEffects { effects: usize, hypotheses: usize },

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate channel: {0}")]
    Degenerate(String),

    #[error("block size must be at least 1")]
    InvalidBlockSize,

    #[error("dimension guard exceeded: {guard} ({value} > {limit})")]
    GuardExceeded {
        guard: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("exponent fit needs at least 2 usable points, got {0}")]
    TooFewPoints(usize),

    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
