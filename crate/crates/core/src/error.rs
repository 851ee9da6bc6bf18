use thiserror::Error;

/// Errors produced by the inversion machinery.
///
/// The variants are grouped so that a front end can map them onto exit
/// statuses: configuration and precondition problems are caller mistakes,
/// domain and numeric problems come from the numbers themselves.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid filter, model or range configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A documented precondition does not hold (e.g. PMF half-width too wide).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An evaluation point lies outside the interval the expansion lives on.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Non-finite characteristic-function output, pole crossing, bad finite
    /// difference step and similar numeric failures.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Enumeration / convolution would exceed its size guard.
    #[error("size limit exceeded: {0}")]
    Size(String),
}

impl Error {
    /// True for errors that stem from the inputs being malformed rather than
    /// from the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Precondition(_) | Error::Size(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
