use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0}: expected 1 <= p < inf")]
    InvalidExponent(f64),

    #[error("ces norm needs p > 1, got {0}")]
    CesExponent(f64),

    #[error("e_{index} does not fit in a sequence of length {len}")]
    CanonicalOutOfRange { index: usize, len: usize },

    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),

    #[error("the zero sequence has no multiplier bracket")]
    ZeroSymbol,

    #[error("probe set is empty")]
    EmptyProbes,

    #[error("block 2^{n} lies below the first nonzero index {start}")]
    WitnessBelowSupport { n: u32, start: usize },

    #[error("this bound is only available for p > 1 (got p = {0})")]
    NeedsPAboveOne(f64),

    #[error("oracle dimension {0} exceeds the cost guard of 6")]
    OracleDimension(usize),

    #[error("oracle needs at least 100000 samples, got {0}")]
    OracleSamples(usize),

    #[error("lambda = 0: (S - 0 I) a = e_0 has no solution")]
    ZeroLambda,

    #[error("|z| = {0} is outside the open unit disc")]
    OutsideDisc(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undecidable: {0}")]
    Undecidable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
