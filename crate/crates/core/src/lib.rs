//! Exchangeable partition probability functions (EPPFs) of Gibbs
//! partitions derived from a positive alpha-stable subordinator.
//!
//! The crate computes the conditional Gibbs coefficients, the V-table of
//! unconditional Gibbs weights for a family of mixing models, and the
//! resulting EPPFs, by three mutually cross-validating routes: closed
//! forms, deterministic quadrature, and Monte Carlo. A forward/backward
//! recursion engine builds whole tables from their first column, a
//! sequential sampler draws partitions from a certified table, and an
//! exact small-n enumerator over set partitions acts as a total
//! probability certificate.

pub mod betagamma;
pub mod error;
pub mod excursion;
pub mod gibbs;
pub mod lamperti;
pub mod model;
pub mod numerics;
pub mod specfun;
pub mod stable;
pub mod validate;

pub use error::{Error, Result};
