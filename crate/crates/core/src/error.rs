use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node {node} is not allowed")]
    SelfLoop { line: usize, node: usize },

    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),

    #[error("infected subgraph is not connected")]
    NotConnected,

    #[error("infected subgraph contains a cycle; use the starlike approximation for general graphs")]
    Cyclic,

    #[error("edge ({0}, {1}) is not a bridge of the infected subgraph")]
    NotABridge(usize, usize),

    #[error("exact evaluation is capped at {cap} infected nodes (got {n}); use the starlike approximation")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure in {context}: {detail}")]
    Numerical { context: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}
