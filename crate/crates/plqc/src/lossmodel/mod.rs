//! Efficiencies, loss injection, Monte Carlo and exact event enumeration.

pub mod enumerate;
pub mod montecarlo;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::qstate::Age;
use crate::rng::{Lane, Stream};

pub use enumerate::{enumerate_event_tree, CnotState, Enumeration, EventClass, EventTreeNode, TreeProtocol};
pub use montecarlo::{run_monte_carlo, run_trial, Estimate, Protocol, Taxonomy, TrialPlan, FIDELITY_TOL};

/// Source, memory and detector efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyParams {
    pub eta_s: f64,
    pub eta_m: f64,
    pub eta_d: f64,
}

impl EfficiencyParams {
    pub fn new(eta_s: f64, eta_m: f64, eta_d: f64) -> Result<Self> {
        for (name, v) in [("eta_s", eta_s), ("eta_m", eta_m), ("eta_d", eta_d)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0,1]")));
            }
        }
        Ok(EfficiencyParams { eta_s, eta_m, eta_d })
    }

    pub fn uniform(eta: f64) -> Result<Self> {
        Self::new(eta, eta, eta)
    }

    pub fn perfect() -> Self {
        EfficiencyParams {
            eta_s: 1.0,
            eta_m: 1.0,
            eta_d: 1.0,
        }
    }

    /// Detection probability of a photon that waited in memory.
    pub fn eta1(&self) -> f64 {
        self.eta_s * self.eta_m * self.eta_d
    }

    /// Detection probability of a fresh photon.
    pub fn eta2(&self) -> f64 {
        self.eta_s * self.eta_d
    }

    pub fn detect_prob(&self, age: Age) -> f64 {
        match age {
            Age::Old => self.eta1(),
            Age::New => self.eta2(),
        }
    }
}

/// Decides, at the moment a photon reaches a detector, whether it is there.
#[derive(Debug, Clone)]
pub enum LossSource {
    Lossless,
    Random { eff: EfficiencyParams, stream: Stream },
    /// Loses exactly the detection events whose 0-based index is listed.
    Inject(BTreeSet<usize>),
}

#[derive(Debug, Clone)]
pub struct Detector {
    source: LossSource,
    events: usize,
}

impl Detector {
    pub fn new(source: LossSource) -> Self {
        Detector { source, events: 0 }
    }

    pub fn lossless() -> Self {
        Self::new(LossSource::Lossless)
    }

    pub fn random(eff: EfficiencyParams, master_seed: u64, run: u64) -> Self {
        Self::new(LossSource::Random {
            eff,
            stream: Stream::new(master_seed, run, Lane::Loss),
        })
    }

    pub fn inject(at: impl IntoIterator<Item = usize>) -> Self {
        Self::new(LossSource::Inject(at.into_iter().collect()))
    }

    pub fn detect(&mut self, age: Age) -> bool {
        let idx = self.events;
        self.events += 1;
        match &mut self.source {
            LossSource::Lossless => true,
            LossSource::Random { eff, stream } => stream.bernoulli(eff.detect_prob(age)),
            LossSource::Inject(at) => !at.contains(&idx),
        }
    }

    /// Number of detection events so far.
    pub fn events(&self) -> usize {
        self.events
    }
}
