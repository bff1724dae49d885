//! Tree tensor-network codes built from two-qubit Cliffords.
//!
//! The crate covers exact enumerators and distances of tree codes, analytic
//! flows of heralded-loss distributions, population-dynamics decoding and
//! direct Monte Carlo sampling.

pub mod classify;
pub mod distance;
pub mod error;
pub mod heralded;
pub mod numeric;
pub mod oracle;
pub mod par;
pub mod pauli;
pub mod popdyn;
pub mod sampler;
pub mod semiring;
pub mod tensors;
pub mod tree;

pub use error::{Error, Result};
