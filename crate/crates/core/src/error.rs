use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on an argument was violated; the message names it.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient truncation: need at least {needed} coefficients, have {have}")]
    InsufficientTruncation { needed: usize, have: usize },

    /// The target series is not a combination of the basis; `index` is the
    /// first exponent at which no combination agrees with the target.
    #[error("not in span: first mismatching coefficient at q^{index}")]
    NotInSpan { index: usize },

    #[error("no representation found at filtration bound {bound}")]
    NoRepresentation { bound: usize },

    #[error("span deficiency: {0}")]
    SpanDeficiency(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A verification check failed; `index` locates the offending row or
    /// coefficient when there is one.
    #[error("verification failed: {message}")]
    Verification { message: String, index: Option<usize> },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn verification(msg: impl Into<String>, index: Option<usize>) -> Self {
        Error::Verification {
            message: msg.into(),
            index,
        }
    }
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
