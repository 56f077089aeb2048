use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("domain mismatch: expected width {expected}, found {found}")]
    DomainMismatch { expected: usize, found: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("invalid row: {0}")]
    InvalidRow(String),

    #[error("invalid base: {0}")]
    InvalidBase(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not a learning space: {0}")]
    NotLearningSpace(String),

    #[error("division by zero: the conditioning event has no states")]
    ZeroDenominator,

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("{0}")]
    Resource(ResourceAbort),

    #[error("stale query: {0}")]
    StaleQuery(String),

    #[error("session is finished")]
    SessionFinished,
}

/// Why a guarded computation stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResourceAbort {
    /// More than `limit` items (states, rows) would have been produced.
    LimitExceeded { what: &'static str, limit: usize },
    /// The deadline passed.
    Timeout,
    /// Another thread asked the computation to stop.
    Cancelled,
}

impl fmt::Display for ResourceAbort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceAbort::LimitExceeded { what, limit } => {
                write!(f, "resource limit exceeded: more than {limit} {what}")
            }
            ResourceAbort::Timeout => f.write_str("resource limit exceeded: deadline passed"),
            ResourceAbort::Cancelled => f.write_str("computation cancelled"),
        }
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for aborts caused by a resource guard rather than bad input.
    pub fn is_resource_abort(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
