use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// The three non-IO variants map onto distinct process exit codes in the CLI:
/// invalid arguments (1), resource limits including count overflow (2), and
/// violated invariants such as a failed exact identity (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A divisor count exceeded 64 bits. Wrapping silently would corrupt
    /// every downstream sum, so this is always a hard failure.
    #[error("count overflow computing tau_{k}({n})")]
    CountOverflow { k: u32, n: u64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed table file: {0}")]
    BadTableFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
