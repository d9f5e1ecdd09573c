use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors are split into two families: malformed input (`Parse`) and
/// well-formed input that violates an operation's precondition (everything
/// else). The CLI maps them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("generator universe mismatch")]
    UniverseMismatch,

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size limit exceeded: {size} > {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("group closure violated: {0}")]
    Closure(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("connecting map rejected: relation `{relation}` of level {level} maps to nonzero `{residual}`")]
    MapRejected {
        level: usize,
        relation: String,
        residual: String,
    },

    #[error("permutation does not solve the presentation: {0}")]
    NotASolution(String),

    #[error("coefficient overflow in 0/1 search")]
    Overflow,
}

impl Error {
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
