use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is out of its admissible range or has the wrong shape.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested projection is multivalued at this input.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The point is outside the effective domain of the objective.
    #[error("point is not in the domain: {0}")]
    NotInDomain(String),

    /// The point was required to be critical but is not.
    #[error("point is not critical (subdifferential distance {residual:e})")]
    NotCritical { residual: f64 },

    /// Brute-force routines refuse instances above their size guard.
    #[error("instance size {size} exceeds the limit {limit} of {operation}")]
    Size {
        operation: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    /// Not enough data for a fit. `partial` carries whatever could be computed.
    #[error("estimation failed: {reason}")]
    Estimation { reason: String, partial: Option<f64> },

    #[error("objective is unbounded below: {0}")]
    Unbounded(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
