use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by the zero element")]
    DivisionByZero,
    #[error("operation undefined for the zero element")]
    ZeroElement,
    #[error("interval arithmetic could not certify the result at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("field is not Galois: {0}")]
    NotGalois(String),
    #[error("field has a real embedding (root {index})")]
    NotTotallyComplex { index: usize },
    #[error("element is not a unit (norm {norm})")]
    NotAUnit { norm: String },
    #[error("unit is not in the span of the supplied generators")]
    NotInSpan,
    #[error("coefficients are linearly dependent (rank {rank} < {expected})")]
    RankDefect { rank: usize, expected: usize },
    #[error("degenerate coefficient at position {0}")]
    DegenerateCoefficient(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matching unavailable: {0}")]
    MatchingUnavailable(String),
    #[error("rank condition failed on columns {witness:?}")]
    RankConditionFailed { witness: Vec<usize> },
    #[error("non-Galois field requires a normal-closure bundle")]
    MissingNormalClosure,
    #[error("box of {points} points exceeds cap {cap}")]
    CapExceeded { points: u128, cap: u128 },
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("validation failed: {check} ({witness})")]
    Validation { check: String, witness: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
