use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("digit {0} is outside the alphabet {{-2, -1, 0, 1, 2}}")]
    DigitOutOfRange(i64),

    #[error("digit {digit} at position {position} is not a binary digit")]
    NotBinary { position: usize, digit: i8 },

    #[error("{value} does not fit in {length} binary digits")]
    OutOfRange { value: BigInt, length: usize },

    #[error("negative exponent {0}")]
    Negative(BigInt),

    #[error("all exponents are zero; the recoding length is undefined")]
    AllZero,

    #[error("joint expansion rows have unequal lengths")]
    RaggedRows,

    #[error("expected dimension {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("|{0}| exceeds the oracle search bound 2^16")]
    OracleBound(i64),

    #[error("{0}")]
    Precondition(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
