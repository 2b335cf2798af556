use thiserror::Error;

/// Errors raised while building or querying a plant model.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid symbol `{0}`")]
    BadSymbol(String),
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("event `{0}` declared twice")]
    DuplicateEvent(String),
    #[error("more than {} events", crate::automaton::MAX_EVENTS)]
    TooManyEvents,
    #[error("no initial state")]
    MissingInitial,
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("transition from `{state}` on `{event}` already goes to `{first}`")]
    Nondeterministic {
        state: String,
        event: String,
        first: String,
    },
    #[error("invalid observation profile: {0}")]
    Profile(&'static str),
    #[error("depth {depth} is smaller than the observed length {needed}")]
    DepthTooSmall { depth: usize, needed: usize },
}

/// A line-numbered parse failure in one of the text formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}
