use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("element {element} is outside the ground set of size {ground_size}")]
    Domain { element: usize, ground_size: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid matroid: {0}")]
    Matroid(String),

    #[error("set is not independent: {0}")]
    Dependent(String),

    #[error("weight of element {element} would increase (level {from} -> {to})")]
    WeightIncrease { element: usize, from: u32, to: u32 },

    #[error("element {0} is frozen")]
    Frozen(usize),

    #[error("element {0} is not in the base")]
    NotInBase(usize),

    #[error("vertices {0} and {1} are already in the same tree")]
    Cycle(usize, usize),

    #[error("unknown edge {0}")]
    UnknownEdge(usize),

    #[error("malformed combination: {0}")]
    Combination(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
