use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The symbol is not strictly positive away from the origin.
    #[error("spectral measure violates strict positivity: {0}")]
    H2Violation(String),

    #[error(
        "grid too small: peak/boundary ratio {ratio:.3e} below {required:.1e}; suggested extent {suggested_extent:.4e}"
    )]
    GridTooSmall {
        ratio: f64,
        required: f64,
        suggested_extent: f64,
    },

    #[error("requested r = {r} is outside the integrability range r < {kappa} ({which})")]
    NotIntegrable { r: f64, kappa: f64, which: &'static str },

    #[error("potential |x|^-gamma with gamma = {gamma} is not locally integrable in dimension {d}")]
    NonIntegrablePotential { gamma: f64, d: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),

    #[error("schema mismatch: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable name of the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::H2Violation(_) => "h2_violation",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::NotIntegrable { .. } => "not_integrable",
            Error::NonIntegrablePotential { .. } => "non_integrable_potential",
            Error::Hypothesis(_) => "hypothesis",
            Error::Invariant(_) => "invariant",
            Error::Quadrature(_) => "quadrature",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Schema(_) => "schema",
        }
    }

    /// The invariant the error reports as violated, where there is one.
    pub fn invariant(&self) -> Option<&'static str> {
        match self {
            Error::H2Violation(_) => Some("omega > 0 on the sphere"),
            Error::GridTooSmall { .. } => Some("peak/boundary ratio >= 1e6"),
            Error::NotIntegrable { which: "kappa1", .. } => Some("r < kappa1"),
            Error::NotIntegrable { .. } => Some("r < kappa2"),
            Error::NonIntegrablePotential { .. } => Some("gamma < d"),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
