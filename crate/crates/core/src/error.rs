use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed line-based input (game, strategy or DQBF files).
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Malformed expression (query DSL, DQBF matrix).
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },

    /// Well-formed input that violates a precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A configured size cap was exceeded.
    #[error("resource limit exceeded: {what} (limit {limit})")]
    Resource { what: String, limit: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn syntax(pos: usize, message: impl Into<String>) -> Self {
        Error::Syntax { pos, message: message.into() }
    }

    pub(crate) fn resource(what: impl Into<String>, limit: usize) -> Self {
        Error::Resource { what: what.into(), limit }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Syntax { .. } | Error::Invalid(_) => 1,
            Error::Resource { .. } => 2,
            Error::Invariant(_) => 3,
        }
    }
}
