//! Quadrature, random-variate generation, and Monte Carlo utilities.

pub(crate) mod dd;
pub mod mc;
pub mod quad;
pub mod rng;
pub mod sampling;

pub use mc::{mc_mean, McConfig, McEstimate};
pub use quad::{quad_finite, quad_halfline, QuadConfig};
pub use rng::{RngFactory, DEFAULT_SEED};
pub use sampling::{
    sample_beta, sample_dirichlet, sample_exponential, sample_gamma, sample_normal,
    sample_uniform,
};
