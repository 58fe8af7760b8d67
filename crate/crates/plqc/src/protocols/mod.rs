//! Loss-detecting logical operations on the state engine.
//!
//! Every protocol works on a [`Run`], which owns the engine, the detector
//! that decides photon loss, and the outcome record. Corrections are applied
//! as soon as the outcome that demands them is known.

mod cascade;
pub mod cnot;
pub mod gates;
pub mod memory;
mod record;

use crate::codes::LogicalQubit;
use crate::error::{Error, Result};
use crate::lossmodel::Detector;
use crate::qstate::{gate, Basis, Engine, FusionOutcome, PhotonId, Status, Unitary};

pub use cnot::cnot_logical;
pub use gates::{x90_logical, z_theta_logical};
pub use memory::{active_memory_cycle, disentangle_block, reencode_parity, Disentangled, Reencoded};
pub use record::{Correction, CorrectionPlan, Event, Milestone, OutcomeRecord, TerminalStatus};

/// Limits that turn pathological retry loops into errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub gate_attempts: usize,
    pub cnot_iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            gate_attempts: 256,
            cnot_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub engine: Engine,
    pub detector: Detector,
    pub record: OutcomeRecord,
    pub budget: Budget,
}

impl Run {
    pub fn new(engine: Engine, detector: Detector) -> Self {
        Run {
            engine,
            detector,
            record: OutcomeRecord::default(),
            budget: Budget::default(),
        }
    }

    pub fn lossless(seed: u64) -> Self {
        Self::new(Engine::new(seed, 0), Detector::lossless())
    }

    pub(crate) fn finish(&mut self, status: TerminalStatus) -> TerminalStatus {
        self.record.status = Some(status);
        status
    }

    pub(crate) fn fail(&mut self) -> TerminalStatus {
        self.finish(TerminalStatus::LogicalFailure)
    }

    pub(crate) fn succeed(&mut self) -> TerminalStatus {
        let s = self.record.success_status();
        self.finish(s)
    }

    /// Draws detection for a photon about to hit a detector. A miss hands
    /// the photon to the environment.
    pub(crate) fn detect(&mut self, id: PhotonId) -> Result<bool> {
        if self.engine.status(id)? != Status::Present {
            return Ok(false);
        }
        let age = self.engine.age(id)?;
        if self.detector.detect(age) {
            Ok(true)
        } else {
            self.engine.lose(id)?;
            self.record.losses_detected += 1;
            self.record.push(Event::LossDetected(id));
            Ok(false)
        }
    }

    pub(crate) fn fuse(&mut self, a: PhotonId, b: PhotonId) -> Result<FusionOutcome> {
        self.detect(a)?;
        self.detect(b)?;
        let outcome = self.engine.fusion_type_ii(a, b)?;
        self.record.fusion_attempts += 1;
        self.record.push(Event::Fusion { a, b, outcome });
        Ok(outcome)
    }

    /// Measures with detection; `None` if the photon turned out missing.
    pub(crate) fn measure(&mut self, id: PhotonId, basis: Basis) -> Result<Option<u8>> {
        if !self.detect(id)? {
            return Ok(None);
        }
        let m = self.engine.measure(id, basis)?;
        self.record.push(Event::Measured(m));
        Ok(Some(m.bit))
    }

    /// Diagonal measurement of every photon in `ids`. All detected photons
    /// of a parity block agree, so the first detected one fixes the sign.
    pub(crate) fn diag_sign(&mut self, ids: &[PhotonId]) -> Result<Option<u8>> {
        let mut sign = None;
        for &p in ids {
            if let Some(b) = self.measure(p, Basis::Diagonal)? {
                sign.get_or_insert(b);
            }
        }
        Ok(sign)
    }

    pub(crate) fn discard(&mut self, ids: &[PhotonId]) -> Result<()> {
        for &p in ids {
            if self.engine.status(p)? == Status::Present {
                self.engine.discard(p)?;
                self.record.push(Event::Discarded(p));
            }
        }
        Ok(())
    }

    pub(crate) fn gate(&mut self, id: PhotonId, u: &Unitary, name: &'static str, angle: f64) -> Result<()> {
        self.engine.apply_1q(id, u)?;
        self.record.push(Event::Gate { photon: id, name, angle });
        Ok(())
    }

    pub(crate) fn x(&mut self, id: PhotonId) -> Result<()> {
        self.engine.apply_1q(id, &gate::x())?;
        self.record.push(Event::Correction(Correction::X(id)));
        Ok(())
    }

    pub(crate) fn z_all(&mut self, ids: &[PhotonId]) -> Result<()> {
        for &p in ids {
            self.engine.apply_1q(p, &gate::z())?;
        }
        self.record.push(Event::Correction(Correction::ZAll(ids.to_vec())));
        Ok(())
    }
}

fn intact(run: &Run, block: &[PhotonId]) -> Result<()> {
    if block.is_empty() {
        return Err(Error::Precondition("empty block".into()));
    }
    for &p in block {
        match run.engine.status(p)? {
            Status::Present => {}
            Status::Lost => return Err(Error::PhotonLost(p)),
            Status::Measured => return Err(Error::PhotonMeasured(p)),
        }
    }
    Ok(())
}

/// Logical Z: Z on every photon of one block.
pub fn pauli_z_logical(run: &mut Run, q: &LogicalQubit) -> Result<()> {
    let block = q.blocks.first().ok_or_else(|| Error::Precondition("no blocks".into()))?;
    intact(run, block)?;
    run.z_all(block)
}

/// Logical X: X on one photon of every block.
pub fn pauli_x_logical(run: &mut Run, q: &LogicalQubit) -> Result<()> {
    for block in &q.blocks {
        intact(run, block)?;
    }
    for block in &q.blocks {
        run.x(block[0])?;
    }
    Ok(())
}

/// `X_theta` on one photon, which acts as `X_theta` on the parity qubit.
pub fn x_theta_parity(run: &mut Run, block: &[PhotonId], theta: f64) -> Result<()> {
    intact(run, block)?;
    run.gate(block[0], &gate::x_theta(theta), "x_theta", theta)
}

impl CorrectionPlan {
    /// Applies the plan to `q`; per-block flags index `q.blocks`.
    pub fn apply(&self, run: &mut Run, q: &LogicalQubit) -> Result<()> {
        if self.x {
            pauli_x_logical(run, q)?;
        }
        if self.z {
            pauli_z_logical(run, q)?;
        }
        for (block, &flip) in q.blocks.iter().zip(&self.block_z) {
            if flip {
                run.z_all(block)?;
            }
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::codes::{make_parity, make_redundant, CodeLayout, LogicalQubitSpec};
    use num_complex::Complex64 as C64;

    #[test]
    fn z_flips_odd_parity_amplitude() {
        let spec = LogicalQubitSpec::bloch(1.0, 0.3);
        let mut run = Run::lossless(0);
        let q = make_parity(&mut run.engine, &spec, 3).unwrap();
        pauli_z_logical(&mut run, &q).unwrap();
        let got = logical_of(&run, &q);
        assert!(overlap([spec.alpha, -spec.beta], got) > 1.0 - 1e-12);
        pauli_z_logical(&mut run, &q).unwrap();
        assert!(overlap(spec.amplitudes(), logical_of(&run, &q)) > 1.0 - 1e-12);
    }

    #[test]
    fn x180_on_one_photon_is_parity_x() {
        let spec = LogicalQubitSpec::bloch(0.7, 0.0);
        let mut run = Run::lossless(0);
        let q = make_parity(&mut run.engine, &spec, 2).unwrap();
        x_theta_parity(&mut run, &q.blocks[0], std::f64::consts::PI).unwrap();
        let got = logical_of(&run, &q);
        assert!(overlap([spec.beta, spec.alpha], got) > 1.0 - 1e-12);
    }

    #[test]
    fn x_logical_on_redundant_code() {
        let spec = LogicalQubitSpec::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let mut run = Run::lossless(0);
        let q = make_redundant(&mut run.engine, &spec, CodeLayout::new(2, 3).unwrap()).unwrap();
        pauli_x_logical(&mut run, &q).unwrap();
        assert!(overlap([spec.beta, spec.alpha], logical_of(&run, &q)) > 1.0 - 1e-12);
    }

    #[test]
    fn paulis_need_intact_blocks() {
        let mut run = Run::lossless(0);
        let q = make_parity(&mut run.engine, &LogicalQubitSpec::zero(), 2).unwrap();
        run.engine.lose(q.blocks[0][1]).unwrap();
        assert!(matches!(pauli_z_logical(&mut run, &q), Err(Error::PhotonLost(_))));
    }
}
