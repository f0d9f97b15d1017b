use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is neither 0 nor a prime")]
    NotPrime(u64),
    #[error("arity mismatch: expected {expected} variables, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("division by zero in the coefficient field")]
    DivisionByZero,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("operation requires characteristic {required}, ring has characteristic {found}")]
    Characteristic { required: &'static str, found: u64 },
    #[error("operator has level {level}, exceeding e = {e}")]
    LevelOverflow { level: u32, e: u32 },
    #[error("size {0} exceeds the supported maximum")]
    TooLarge(usize),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
