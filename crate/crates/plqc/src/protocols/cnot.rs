//! Logical CNOT, one target block at a time.
//!
//! Each iteration re-encodes control block 0 into a resource that carries a
//! copy of the control value on a short target block T plus port D, then
//! fuses D into the next pending target block. Target blocks that end up
//! merged with T carry `t xor c` and are done.

use crate::codes::{CodeLayout, LogicalQubit};
use crate::error::{Error, Result};
use crate::qstate::{Age, FusionOutcome, PhotonId};

use super::cascade::{run_cascade, Cascade, End, Kind};
use super::memory::cycle;
use super::{intact, Milestone, Run, TerminalStatus};

/// Target length inside the CNOT resource. Single-photon blocks still get
/// a one-photon T so that the resource stays a real CNOT.
pub fn resource_target_len(n: usize) -> usize {
    (n / 2).max(1)
}

enum Step {
    Progress,
    NoProgress,
    Failed,
}

/// Applies CNOT with `ctrl` as control and `tgt` as target. Both must be in
/// `layout` on entry; the target block lengths change as blocks are merged.
pub fn cnot_logical(run: &mut Run, ctrl: &mut LogicalQubit, tgt: &mut LogicalQubit, layout: CodeLayout) -> Result<TerminalStatus> {
    for q in [&*ctrl, &*tgt] {
        if q.lens() != vec![layout.n; layout.q] {
            return Err(Error::Precondition(format!("qubit has blocks {:?}, layout is {layout:?}", q.lens())));
        }
        q.blocks.iter().try_for_each(|b| intact(run, b))?;
    }
    let mut done = vec![false; tgt.blocks.len()];
    let mut iterations = 0;
    while let Some(p) = done.iter().position(|d| !d) {
        if iterations >= run.budget.cnot_iterations {
            return Err(Error::Budget(iterations));
        }
        iterations += 1;
        let step = iterate(run, ctrl, tgt, &mut done, p, layout)?;
        run.engine.age_all(Age::Old);
        match step {
            Step::Progress => run.record.note(Milestone::Progress),
            Step::NoProgress => run.record.note(Milestone::NoProgress),
            Step::Failed => return Ok(run.fail()),
        }
    }
    Ok(run.succeed())
}

fn iterate(run: &mut Run, ctrl: &mut LogicalQubit, tgt: &mut LogicalQubit, done: &mut Vec<bool>, p: usize, layout: CodeLayout) -> Result<Step> {
    let m = resource_target_len(layout.n);
    let spec = Cascade {
        kind: Kind::Cnot { n: layout.n, m },
        pre: None,
        orphan_recoverable: true,
    };
    let block = ctrl.blocks[0].clone();
    let (t, d) = match run_cascade(run, &block, &ctrl.blocks[1..], &spec)? {
        End::Encoded { mut res, .. } => {
            let mut td = res.blocks.pop().expect("two resource blocks");
            ctrl.blocks[0] = res.blocks.pop().expect("two resource blocks");
            let d = td.pop().expect("port D");
            (td, d)
        }
        End::Partial => {
            ctrl.blocks.remove(0);
            return Ok(if cycle(run, ctrl, layout)? { Step::NoProgress } else { Step::Failed });
        }
        End::Failed => return Ok(Step::Failed),
    };

    let target = tgt.blocks[p].clone();
    let rest = &target[1..];
    match run.fuse(d, target[0])? {
        FusionOutcome::Success { sign } => {
            if sign < 0 {
                run.z_all(&t)?;
                run.z_all(&ctrl.blocks[0])?;
            }
            tgt.blocks[p] = rest.iter().chain(&t).copied().collect();
            done[p] = true;
            Ok(Step::Progress)
        }
        FusionOutcome::Failure { bits: (bd, bp) } => {
            run.record.failed_fusions += 1;
            if bd == 1 {
                run.x(t[0])?;
            }
            if !release(run, &t, &ctrl.blocks[0])? || rest.is_empty() {
                return Ok(Step::Failed);
            }
            if bp == 1 {
                run.x(rest[0])?;
            }
            tgt.blocks[p] = rest.to_vec();
            Ok(Step::NoProgress)
        }
        FusionOutcome::LossDetected { .. } => {
            if !release(run, &t, &ctrl.blocks[0])? || rest.is_empty() {
                return Ok(Step::Failed);
            }
            let Some(sign) = run.diag_sign(rest)? else {
                return Ok(Step::Failed);
            };
            tgt.blocks.remove(p);
            done.remove(p);
            if tgt.blocks.is_empty() {
                return Ok(Step::Failed);
            }
            if sign == 1 {
                // The dropped block held the unmodified target value. Another
                // pending block still does; a done one holds `t xor c`.
                match done.iter().position(|d| !d) {
                    Some(j) => run.z_all(&tgt.blocks[j])?,
                    None => {
                        run.z_all(&tgt.blocks[0])?;
                        run.z_all(&ctrl.blocks[0])?;
                    }
                }
            }
            run.record.note(Milestone::PartialFailure);
            Ok(Step::Progress)
        }
    }
}

/// Disentangles the T copy of the control value, fixing the phase on the
/// control. False if no photon of T was seen.
fn release(run: &mut Run, t: &[PhotonId], control: &[PhotonId]) -> Result<bool> {
    match run.diag_sign(t)? {
        Some(s) => {
            if s == 1 {
                run.z_all(control)?;
            }
            Ok(true)
        }
        None => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{logical_projection, make_redundant, LogicalQubitSpec};
    use crate::lossmodel::Detector;
    use crate::qstate::{fidelity, Engine, FusionChoice, Script};
    use num_complex::Complex64 as C64;

    fn logical_pair(run: &Run, ctrl: &LogicalQubit, tgt: &LogicalQubit) -> [C64; 4] {
        let v = logical_projection(&run.engine, &[ctrl, tgt]).unwrap();
        [v[0], v[1], v[2], v[3]]
    }

    fn cnot_oracle(a: &LogicalQubitSpec, b: &LogicalQubitSpec) -> [C64; 4] {
        let (x, y) = (a.amplitudes(), b.amplitudes());
        [x[0] * y[0], x[0] * y[1], x[1] * y[1], x[1] * y[0]]
    }

    fn run_cnot(a: &LogicalQubitSpec, b: &LogicalQubitSpec, layout: CodeLayout, mut run: Run) -> (TerminalStatus, Run) {
        let mut ctrl = make_redundant(&mut run.engine, a, layout).unwrap();
        let mut tgt = make_redundant(&mut run.engine, b, layout).unwrap();
        let status = cnot_logical(&mut run, &mut ctrl, &mut tgt, layout).unwrap();
        if status.is_success() {
            let got = logical_pair(&run, &ctrl, &tgt);
            let f = fidelity(&cnot_oracle(a, b), &got);
            assert!(f > 1.0 - 1e-10, "fidelity {f} {layout:?}\n{}", run.record.to_lines());
        }
        (status, run)
    }

    #[test]
    fn classical_row_flips_target() {
        let layout = CodeLayout::new(2, 2).unwrap();
        let wins = (0..20)
            .filter(|&seed| run_cnot(&LogicalQubitSpec::one(), &LogicalQubitSpec::zero(), layout, Run::lossless(seed)).0.is_success())
            .count();
        assert!(wins > 0);
    }

    #[test]
    fn plus_control_makes_a_bell_pair() {
        for (n, q) in [(2, 2), (3, 2), (2, 3), (1, 1)] {
            let layout = CodeLayout::new(n, q).unwrap();
            let wins = (0..20)
                .filter(|&seed| run_cnot(&LogicalQubitSpec::plus(), &LogicalQubitSpec::zero(), layout, Run::lossless(seed)).0.is_success())
                .count();
            assert!(wins > 0, "{layout:?}");
        }
    }

    #[test]
    fn generic_inputs_match_the_oracle() {
        let a = LogicalQubitSpec::bloch(1.0, 0.6);
        let b = LogicalQubitSpec::bloch(2.2, -1.1);
        for seed in 0..20 {
            run_cnot(&a, &b, CodeLayout::new(2, 2).unwrap(), Run::lossless(seed));
        }
    }

    #[test]
    fn forced_target_fusion_outcomes() {
        let a = LogicalQubitSpec::bloch(0.7, 0.2);
        let b = LogicalQubitSpec::bloch(1.9, 0.8);
        let layout = CodeLayout::new(3, 2).unwrap();
        let choices = [
            FusionChoice::Sign(-1),
            FusionChoice::Bits(0, 1),
            FusionChoice::Bits(1, 0),
        ];
        for second in choices {
            let mut run = Run::lossless(2);
            run.engine.set_script(Script::fusions([FusionChoice::Success, second]));
            let (s, run) = run_cnot(&a, &b, layout, run);
            assert!(s.is_success());
            assert!(run.record.fusion_attempts >= 4);
        }
    }

    #[test]
    fn loss_blindness_under_single_injected_losses() {
        let a = LogicalQubitSpec::bloch(0.9, 0.3);
        let b = LogicalQubitSpec::bloch(1.4, 2.0);
        let layout = CodeLayout::new(2, 2).unwrap();
        let mut recovered = 0;
        for at in 0..14 {
            for seed in 0..4 {
                for hidden in [0, 1] {
                    let mut run = Run::new(Engine::new(seed, 0), Detector::inject([at]));
                    run.engine.set_script(Script::default().with_hidden(hidden));
                    let (s, run) = run_cnot(&a, &b, layout, run);
                    recovered += (s == TerminalStatus::RecoveredThenSuccess) as usize;
                    let _ = run;
                }
            }
        }
        assert!(recovered > 0);
    }
}
