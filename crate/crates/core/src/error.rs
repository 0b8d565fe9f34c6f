use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge (best estimate {estimate:e}, error bound {error_bound:e})")]
    QuadratureNoConvergence { estimate: f64, error_bound: f64 },

    #[error("integrand returned a non-finite value at x = {x:e}")]
    IntegrandNan { x: f64 },

    #[error("integrand tail does not decay (x*f(x) = {value:e} at x = {x:e})")]
    NonDecayingTail { x: f64, value: f64 },

    #[error("series diverged after {terms} terms (last term {last_term:e})")]
    SeriesDiverged { terms: usize, last_term: f64 },

    #[error("series cannot reach the requested accuracy in double precision (achievable ~{achievable:e})")]
    SeriesPrecisionLoss { achievable: f64 },

    #[error("gamma function pole or invalid argument at {0}")]
    GammaDomain(f64),

    #[error("negative probability in cell (n = {n}, k = {k}): {value:e}")]
    NegativeProbability { n: usize, k: usize, value: f64 },

    #[error("composition of {n} items exceeds the table size N = {cap}")]
    OutOfRange { n: usize, cap: usize },

    #[error("normalizer is not positive and finite: {0:e}")]
    BadNormalizer(f64),

    #[error("model spec: {0}")]
    ModelSpec(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
