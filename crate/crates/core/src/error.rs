use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty support")]
    EmptySupport,

    #[error("window is identically zero")]
    ZeroWindow,

    #[error("signal is identically zero")]
    ZeroSignal,

    #[error("negative measurement entry {value} at ({k}, {l})")]
    NegativeMeasurement { k: usize, l: usize, value: f64 },

    #[error("window is not generic short: {0}")]
    NonGenericWindow(String),

    #[error("window is not of length-(L+1) class: {0}")]
    NotShortWindow(String),

    #[error("invalid anchor: {0}")]
    AnchorInvalid(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("rejection sampling gave up after {0} draws")]
    RejectionLimit(usize),

    #[error("invalid counterexample bundle: {0}")]
    InvalidBundle(String),

    #[error("shift {0} lies in the difference set of the window")]
    ShiftInDifferenceSet(i64),

    #[error("division outside the support mask at ({k}, {l})")]
    MaskViolation { k: usize, l: usize },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
