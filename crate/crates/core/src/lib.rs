//! Analysis toolkit for two-qubit entanglement as a teleportation resource.
//!
//! The crate centers on the fully entangled fraction of a two-qubit density
//! matrix: the largest overlap the state has with any maximally entangled
//! state. It provides exact closed-form evaluation via a local-unitary
//! canonical form, a brute-force cross-check, dissipative channels that can
//! raise the fraction, reduction-criterion diagnostics, a projected-gradient
//! solver for the best one-sided channel preprocessing, and a simulator for
//! the standard teleportation scheme with an arbitrary resource state.

mod error;

pub mod channels;
pub mod criteria;
pub mod fef;
pub mod improve;
pub mod linalg;
pub mod optimize;
pub mod sample;
pub mod state;
pub mod teleport;

pub use error::{Error, Result};
