//! Simulation and resource estimation for a partially fault-tolerant architecture that pairs
//! surface-code Clifford operations with directly injected analog rotations.
//!
//! - [`pauli`], [`circuit`], [`frame`]: Pauli algebra, layered circuits with explicit fault
//!   sites, Pauli-frame propagation and exhaustive single-fault enumeration.
//! - [`surface_code`]: rotated surface-code layout and the memory experiment.
//! - [`decoder`]: detector graphs and minimum-weight perfect matching.
//! - [`injection`]: the two-stage ancilla injection protocol and its first-order oracle.
//! - [`rotation`]: repeat-until-success rotations and probabilistic error cancellation.
//! - [`estimator`]: scaling fits and closed-form resource estimates.

pub mod circuit;
pub mod decoder;
pub mod error;
pub mod estimator;
pub mod frame;
pub mod injection;
pub mod montecarlo;
pub mod pauli;
pub mod rotation;
pub mod surface_code;

pub use error::{Result, StarError};
