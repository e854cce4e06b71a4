use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision of {0} bits is below the minimum of 32")]
    PrecisionTooLow(u32),

    #[error("unknown constant `{0}` (expected pi, euler_gamma or log2)")]
    UnknownConstant(String),

    #[error("index {k} is divisible by the modulus {q}")]
    ZeroIndex { k: i64, q: u64 },

    #[error("invalid modulus {0}")]
    InvalidModulus(u64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("series diverges: Σf(a) = {sum} ≠ 0")]
    Divergent { sum: String },

    #[error("character: {0}")]
    Character(String),

    #[error("invalid relation parameters: {0}")]
    InvalidRelation(String),

    #[error("precision {prec} bits is too low for coefficient bound {bound}")]
    BoundTooLarge { bound: String, prec: u32 },

    #[error("too many values for relation search: {0} (limit {1})")]
    TooManyValues(usize, usize),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
