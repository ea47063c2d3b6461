use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} did not converge within {cap} iterations")]
    Convergence { what: &'static str, cap: usize },

    #[error("could not bracket zero {r} of J_{alpha}")]
    Bracketing { alpha: f64, r: usize },

    #[error("dual Christoffel number w*_{index} = {value} is not positive")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("zeros {i} and {j} are too close to form an inverse covariance entry")]
    DegenerateSpacing { i: usize, j: usize },

    #[error("inverse covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("quadrature did not converge: last two refinements {previous} and {current}")]
    Quadrature { previous: f64, current: f64 },

    #[error("acceptance rate {rate:.3} outside [0.05, 0.7]: {hint}")]
    Tuning { rate: f64, hint: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
