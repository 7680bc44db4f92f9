use thiserror::Error;

/// Errors raised by the kernel, experiment and output layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact integer result does not fit in the platform integer.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// A computation would exceed its configured work budget.
    #[error("resource limit exceeded: {what} needs {needed}, budget is {budget}")]
    Resource {
        what: &'static str,
        needed: u64,
        budget: u64,
    },

    /// A fit could not be formed from the supplied data.
    #[error("fit error: {0}")]
    Fit(String),

    #[error("unsupported dimension {dim} (supported: {supported})")]
    UnsupportedDimension { dim: usize, supported: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
