use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("unknown kind: {0}")]
    UnknownKind(String),

    #[error("solver budget of {budget} candidate tuples exhausted")]
    Exhausted { budget: u32 },

    #[error("no tuple met the target ratio after {attempts} attempts (best achieved: {best_alpha})")]
    RetriesExhausted { attempts: u32, best_alpha: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub fn out_of_range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }
}
