use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("node index {node} out of range for graph with {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("expected a {expected}-classifier, got a {found}-classifier")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid gadget parameters: {0}")]
    InvalidGadget(String),
    #[error("network has no certified upper bound")]
    MissingBound,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable x{0}")]
    UnknownVariable(usize),
    #[error("unknown colour name `{0}`")]
    UnknownName(String),
    #[error("program is not in the DGLP fragment: {0}")]
    NotDglp(String),
    #[error("invalid PCP instance: {0}")]
    InvalidInstance(String),
    #[error("invalid PCP solution: {0}")]
    InvalidSolution(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
