use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mixed scalar kinds: {0} and {1}")]
    MixedKinds(String, String),

    #[error("base order {0} is below -1")]
    BaseOrderTooLow(i32),

    #[error("series has base order {0}, expected 0")]
    NotPowerSeries(i32),

    #[error("division by a series with zero constant coefficient")]
    ZeroConstantTerm,

    #[error("coefficient index {index} outside stored range {base}..={max}")]
    OrderOutOfRange { index: i32, base: i32, max: i32 },

    #[error("cannot evaluate a Laurent series at zero")]
    LaurentAtZero,

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not representable as an exact rational")]
    Inexact(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{family}: pivot degenerate at {parameter}")]
    Degenerate { family: String, parameter: String },

    #[error("internal: {0}")]
    Internal(String),

    #[error("degenerate Pade table at [{l}/{m}]")]
    DegeneratePade { l: usize, m: usize },

    #[error("Pade approximant has a pole at the evaluation point")]
    PadePole,

    #[error("oracle check failed: {0}")]
    Oracle(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
