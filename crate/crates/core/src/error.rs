use thiserror::Error;

/// Errors raised by basis construction, fitting and smoothing-parameter selection.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HpError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("site {x} lies outside the fitting domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("singular system: non-positive pivot at index {index}; {guidance}")]
    Singular { index: usize, guidance: String },

    #[error("frequency out of range: {0}")]
    Range(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("degenerate degrees of freedom: m = {m}, trace(H) = {df}")]
    DegenerateDf { m: usize, df: f64 },

    #[error("no lambda on the grid reaches the target RSS {target}; RSS spans [{rss_min}, {rss_max}]")]
    NoSolution {
        target: f64,
        rss_min: f64,
        rss_max: f64,
    },

    #[error("quadrature accuracy failure: {0}")]
    Accuracy(String),
}

pub type Result<T> = std::result::Result<T, HpError>;

pub(crate) fn invalid(msg: impl Into<String>) -> HpError {
    HpError::InvalidArgument(msg.into())
}
