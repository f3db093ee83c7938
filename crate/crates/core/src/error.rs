use thiserror::Error;

use crate::basis::BasisTag;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid manifold: {0}")]
    InvalidManifold(String),

    #[error("level index {index} outside range {lo}..={hi}")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("invalid Taylor order {0}; expected 1, 2 or 3")]
    InvalidOrder(u32),

    #[error("expected amplitudes in the {expected:?} basis, got {found:?}")]
    BasisMismatch { expected: BasisTag, found: BasisTag },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative time interval {0}")]
    NegativeInterval(f64),

    #[error("empty time grid")]
    EmptyGrid,

    #[error("time grid is not monotone at sample {0}")]
    NonMonotoneGrid(usize),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("integration step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("pulse validation failed: {0}")]
    PulseValidation(String),

    #[error("invalid quantity {0:?}")]
    Quantity(String),

    #[error("config error at {field}: {message}")]
    Config { field: String, message: String },

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("event {index} failed: {source}")]
    Event {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
