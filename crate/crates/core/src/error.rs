use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("site {site} out of range for {n_sites} sites")]
    InvalidSite { site: usize, n_sites: usize },

    #[error("{what} is {size}, exceeding the limit of {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid forest: {0}")]
    InvalidForest(String),

    #[error("arc ({0} -> {1}) is not in the digraph")]
    UnknownArc(usize, usize),

    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// Parameter-class errors are caller mistakes rather than runtime failures.
    pub fn is_parameter_error(&self) -> bool {
        !matches!(self, Error::Format(_))
    }
}
