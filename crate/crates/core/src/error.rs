use thiserror::Error;

/// Errors produced by the solvers, oracles and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot parse rational number {text:?}: {reason}")]
    ParseRational { text: String, reason: &'static str },

    #[error(
        "bundle of {size} items exceeds the enumeration bound of {bound}; instance too large for exact verification"
    )]
    EnumerationBound { size: usize, bound: usize },

    #[error("algorithm precondition not met: {0}")]
    Precondition(String),

    #[error("exact search needs {required} assignments but the limit is {limit}")]
    SearchTooLarge { required: String, limit: u64 },

    #[error("kappa is undefined for an instance without items")]
    UndefinedKappa,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
