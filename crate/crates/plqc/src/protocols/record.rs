use std::fmt::{self, Write as _};

use crate::qstate::{Basis, FusionOutcome, MeasurementRecord, PhotonId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Success,
    RecoveredThenSuccess,
    LogicalFailure,
}

impl TerminalStatus {
    pub fn is_success(self) -> bool {
        self != TerminalStatus::LogicalFailure
    }
}

impl fmt::Display for TerminalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalStatus::Success => "success",
            TerminalStatus::RecoveredThenSuccess => "recovered_then_success",
            TerminalStatus::LogicalFailure => "logical_failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Correction {
    X(PhotonId),
    ZAll(Vec<PhotonId>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Milestone {
    /// A block was disentangled after a detected loss.
    PartialFailure,
    /// CNOT iteration that left both qubits intact but unadvanced.
    NoProgress,
    /// One parity-level CNOT done (or a damaged target block removed).
    Progress,
    /// Gate attempt ended with the conjugate rotation; `residual` radians remain.
    Retry { residual: f64 },
    MemoryRestored,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Fusion {
        a: PhotonId,
        b: PhotonId,
        outcome: FusionOutcome,
    },
    Measured(MeasurementRecord),
    LossDetected(PhotonId),
    Gate {
        photon: PhotonId,
        name: &'static str,
        angle: f64,
    },
    Correction(Correction),
    Discarded(PhotonId),
    Note(Milestone),
}

/// Deterministic Pauli-level fix-up, applied eagerly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorrectionPlan {
    pub x: bool,
    pub z: bool,
    pub block_z: Vec<bool>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutcomeRecord {
    pub events: Vec<Event>,
    pub status: Option<TerminalStatus>,
    /// Failed fusion attempts before the last successful re-encoding.
    pub k: usize,
    pub fusion_attempts: usize,
    pub failed_fusions: usize,
    pub losses_detected: usize,
    pub partial_failures: usize,
    pub no_progress: usize,
    pub gate_attempts: usize,
    pub recoveries: usize,
}

impl OutcomeRecord {
    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn note(&mut self, m: Milestone) {
        match m {
            Milestone::PartialFailure => {
                self.partial_failures += 1;
                self.recoveries += 1;
            }
            Milestone::NoProgress => self.no_progress += 1,
            _ => {}
        }
        self.events.push(Event::Note(m));
    }

    /// Status implied by the counters for a run that ended well.
    pub fn success_status(&self) -> TerminalStatus {
        if self.recoveries > 0 {
            TerminalStatus::RecoveredThenSuccess
        } else {
            TerminalStatus::Success
        }
    }

    /// Line-delimited text form, one event per line, then a summary line.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = writeln!(out, "{}", format_event(e));
        }
        let status = self.status.map(|s| s.to_string()).unwrap_or_else(|| "running".into());
        let _ = writeln!(
            out,
            "status={} k={} fusions={} failed_fusions={} losses={} partial_failures={} no_progress={} gate_attempts={}",
            status,
            self.k,
            self.fusion_attempts,
            self.failed_fusions,
            self.losses_detected,
            self.partial_failures,
            self.no_progress,
            self.gate_attempts
        );
        out
    }
}

fn format_event(e: &Event) -> String {
    match e {
        Event::Fusion { a, b, outcome } => {
            let o = match outcome {
                FusionOutcome::Success { sign } => format!("success sign={sign:+}"),
                FusionOutcome::Failure { bits } => format!("failure bits={}{}", bits.0, bits.1),
                FusionOutcome::LossDetected { photons_seen } => format!("loss_detected seen={photons_seen}"),
            };
            format!("fusion a={a} b={b} {o}")
        }
        Event::Measured(m) => {
            let basis = match m.basis {
                Basis::Computational => "z",
                Basis::Diagonal => "x",
            };
            format!("measure photon={} basis={} bit={}", m.photon, basis, m.bit)
        }
        Event::LossDetected(p) => format!("loss photon={p}"),
        Event::Gate { photon, name, angle } => format!("gate {name} photon={photon} angle={angle:.6}"),
        Event::Correction(Correction::X(p)) => format!("correct x photon={p}"),
        Event::Correction(Correction::ZAll(ps)) => {
            let ids: Vec<String> = ps.iter().map(ToString::to_string).collect();
            format!("correct z photons={}", ids.join(","))
        }
        Event::Discarded(p) => format!("discard photon={p}"),
        Event::Note(m) => match m {
            Milestone::PartialFailure => "note partial_failure".into(),
            Milestone::NoProgress => "note no_progress".into(),
            Milestone::Progress => "note progress".into(),
            Milestone::Retry { residual } => format!("note retry residual={residual:.6}"),
            Milestone::MemoryRestored => "note memory_restored".into(),
        },
    }
}
