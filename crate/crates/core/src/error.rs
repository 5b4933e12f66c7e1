use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Range(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("search capacity exceeded: {0}")]
    Capacity(String),

    #[error("solver inconclusive: {0}")]
    Inconclusive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity(_) => 3,
            Error::Inconclusive(_) => 4,
            _ => 2,
        }
    }
}

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::Invalid(format!($($arg)*)) };
}
pub(crate) use invalid;
