use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a physical formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration field violates its invariant. `field` is the dotted path.
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    /// The drift matrix is not Hurwitz, so no steady state exists.
    #[error("drift matrix is not stable (spectral abscissa {spectral_abscissa:e})")]
    Unstable { spectral_abscissa: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The covariance matrix handed to the negativity routine cannot belong to a
    /// physical state. This indicates a bug upstream, never physics.
    #[error("unphysical two-mode covariance: {0}")]
    UnphysicalState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sweep produced no stable grid point")]
    EmptyResult,
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
