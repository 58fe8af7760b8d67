//! Closed-form success probabilities, the optimal number of blocks and
//! efficiency thresholds. Everything is evaluated in log space so that
//! blocks of a thousand photons do not underflow.

mod cnot;
pub mod logmath;
mod memory;
mod threshold;

use crate::error::{Error, Result};

pub use cnot::{m_terms, p_total, progress_k, CnotModel, MTerms};
pub use memory::{
    one_minus_p_e, optimal_q, optimal_q_with, p_e, p_ff, p_qf, p_qs, recovery_r, MemoryModel, MemoryPoint, OptimalQ,
    DEFAULT_Q_MAX,
};
pub use threshold::{find_threshold, ProtocolKind, ThresholdConfig, ThresholdReport, ThresholdRow};

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be a finite value >= 1, got {q}")));
    }
    Ok(())
}

fn check_eta(eta1: f64, eta2: f64) -> Result<()> {
    for (name, v) in [("eta1", eta1), ("eta2", eta2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} outside [0,1]")));
        }
    }
    Ok(())
}
