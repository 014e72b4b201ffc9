use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state is not normalized (sum of |A|^2 = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },

    #[error("cannot normalize a state with norm {norm:e}")]
    ZeroNorm { norm: f64 },

    #[error("degenerate separable spec: {0}")]
    DegenerateSeparable(&'static str),

    #[error("total detector intensity must be positive, got {0}")]
    ZeroIntensity(f64),

    #[error("detector intensity {which} is negative or not finite ({value})")]
    BadIntensity { which: &'static str, value: f64 },

    #[error("raw table is missing the row for basis {0}")]
    MissingBasis(&'static str),

    #[error("raw table has more than one row for basis {0}")]
    DuplicateBasis(&'static str),

    #[error("line {line}: {message}")]
    Table { line: usize, message: String },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("bench program has no detector bank")]
    NoDetectors,

    #[error("invalid bench pipeline: {0}")]
    Pipeline(String),

    #[error("single-photon sector has zero weight (coherent amplitude is zero)")]
    ZeroSinglePhotonWeight,

    #[error("render grid must be at least 2x2 with positive extent")]
    InvalidGrid,

    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: usize, got: usize },
}
