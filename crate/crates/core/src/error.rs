use std::fmt;

use crate::graph::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: u32, n: usize },

    #[error("pair {{{0}, {0}}} is a self-loop")]
    SelfLoop(u32),

    #[error("malformed input: {0}")]
    Input(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("expected a {expected} instance, got {found}")]
    ModeMismatch { expected: Mode, found: Mode },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance exceeds the brute-force guard: {0}")]
    Capability(String),

    #[error("time limit exceeded")]
    Timeout,
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            message: message.to_string(),
        }
    }

    pub(crate) fn input(message: impl fmt::Display) -> Self {
        Error::Input(message.to_string())
    }
}
