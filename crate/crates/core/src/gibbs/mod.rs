//! The EPPF core: conditional Gibbs coefficients, V-tables, recursion,
//! the sequential partition sampler, and the enumeration certifier.

pub mod cond;
pub mod enumerate;
pub mod sampler;
pub mod serial;
pub mod types;
pub mod vtable;

pub use types::{Certification, Composition, EppfValue, HFn, Method, MixingModel, SetPartition, VTable};
