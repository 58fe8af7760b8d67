//! Loss-tolerant photonic logical qubits built from parity and redundancy
//! codes: a state-vector engine, the fusion-based logical protocols, exact
//! and sampled loss models, closed-form success probabilities and resource
//! costs.

pub mod error;
pub mod rng;
pub mod qstate;
pub mod codes;
pub mod protocols;
pub mod lossmodel;
pub mod analytics;
pub mod resources;
pub mod cli;

pub use error::{Error, Result};
