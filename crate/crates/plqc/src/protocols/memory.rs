//! Re-encoding, disentangling and the active memory cycle.

use crate::codes::{make_memory_resource, CodeLayout, LogicalQubit};
use crate::error::{Error, Result};
use crate::qstate::{Age, FusionOutcome, PhotonId};

use super::cascade::{run_cascade, Cascade, End, Kind};
use super::{intact, Milestone, Run, TerminalStatus};

/// Result of extending a parity block with a fresh `|0>` block.
#[derive(Debug, Clone, PartialEq)]
pub enum Reencoded {
    /// The block now spans its old remainder plus the resource remainder.
    Extended(Vec<PhotonId>),
    /// Fusion failed: the block lost one photon and the resource remainder
    /// is a fresh `|0>` block again.
    Shrunk { block: Vec<PhotonId>, leftover: Vec<PhotonId> },
    /// One of the fused photons was missing.
    LossDetected,
}

/// Fuses the first photon of `block` with one end of a fresh `|0>` parity
/// block of `resource_len` photons.
pub fn reencode_parity(run: &mut Run, block: &[PhotonId], resource_len: usize) -> Result<Reencoded> {
    if resource_len < 2 {
        return Err(Error::Domain(format!("resource needs at least 2 photons, got {resource_len}")));
    }
    intact(run, block)?;
    let res = make_memory_resource(&mut run.engine, resource_len - 1, 1)?;
    let tail = res.blocks[0].clone();
    match run.fuse(block[0], res.port_c)? {
        FusionOutcome::Success { sign } => {
            if sign < 0 {
                run.z_all(&tail)?;
            }
            Ok(Reencoded::Extended(block[1..].iter().chain(&tail).copied().collect()))
        }
        FusionOutcome::Failure { bits: (ba, bb) } => {
            run.record.failed_fusions += 1;
            if ba == 1 && block.len() > 1 {
                run.x(block[1])?;
            }
            if bb == 1 {
                run.x(tail[0])?;
            }
            Ok(Reencoded::Shrunk {
                block: block[1..].to_vec(),
                leftover: tail,
            })
        }
        FusionOutcome::LossDetected { .. } => Ok(Reencoded::LossDetected),
    }
}

/// Outcome of measuring one block out of a logical qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disentangled {
    /// The block is gone; `sign` was the inferred phase, already corrected.
    Removed { sign: u8 },
    /// Every photon of the block was missing, so the phase is unknown.
    Undetermined,
}

/// Measures every present photon of block `index` diagonally, corrects the
/// phase on another block and drops the block from `q`.
pub fn disentangle_block(run: &mut Run, q: &mut LogicalQubit, index: usize) -> Result<Disentangled> {
    if q.blocks.len() < 2 {
        return Err(Error::Precondition("cannot disentangle the only block".into()));
    }
    if index >= q.blocks.len() {
        return Err(Error::Precondition(format!("block {index} out of range")));
    }
    let block = q.blocks.remove(index);
    let Some(sign) = run.diag_sign(&block)? else {
        return Ok(Disentangled::Undetermined);
    };
    if sign == 1 {
        run.z_all(&q.blocks[0])?;
    }
    run.record.note(Milestone::PartialFailure);
    Ok(Disentangled::Removed { sign })
}

/// One identity cycle: re-encodes `q` onto fresh photons in `layout`,
/// tolerating loss on all but one block.
pub fn active_memory_cycle(run: &mut Run, q: &mut LogicalQubit, layout: CodeLayout) -> Result<TerminalStatus> {
    Ok(if cycle(run, q, layout)? { run.succeed() } else { run.fail() })
}

/// The cycle without setting a terminal status, for use inside gates.
pub(crate) fn cycle(run: &mut Run, q: &mut LogicalQubit, layout: CodeLayout) -> Result<bool> {
    let spec = Cascade {
        kind: Kind::Memory { n: layout.n, q: layout.q },
        pre: None,
        orphan_recoverable: true,
    };
    let ok = loop {
        let Some(block) = q.blocks.first().cloned() else {
            break false;
        };
        match run_cascade(run, &block, &q.blocks[1..], &spec)? {
            End::Encoded { res, .. } => {
                let mut sign = 0;
                let mut known = true;
                for other in &q.blocks[1..] {
                    match run.diag_sign(other)? {
                        Some(s) => sign ^= s,
                        None => known = false,
                    }
                }
                if !known {
                    break false;
                }
                if sign == 1 {
                    run.z_all(&res.blocks[0])?;
                }
                q.blocks = res.blocks;
                break true;
            }
            End::Partial => {
                q.blocks.remove(0);
            }
            End::Failed => break false,
        }
    };
    run.engine.age_all(Age::Old);
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{make_parity, make_redundant, LogicalQubitSpec};
    use crate::lossmodel::Detector;
    use crate::protocols::testutil::*;
    use crate::qstate::{Engine, FusionChoice, Script};
    use num_complex::Complex64 as C64;

    fn spec() -> LogicalQubitSpec {
        LogicalQubitSpec::bloch(1.1, 0.4)
    }

    #[test]
    fn extension_success_gives_longer_block() {
        for sign in [1, -1] {
            let mut run = Run::lossless(3);
            let q = make_parity(&mut run.engine, &spec(), 2).unwrap();
            run.engine.set_script(Script::fusions([FusionChoice::Sign(sign)]));
            let Reencoded::Extended(block) = reencode_parity(&mut run, &q.blocks[0], 3).unwrap() else {
                panic!("forced success");
            };
            assert_eq!(block.len(), 3);
            let got = logical_of(&run, &LogicalQubit { blocks: vec![block] });
            assert!(overlap(spec().amplitudes(), got) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn extension_failure_leaves_shorter_block_and_fresh_zero() {
        for bits in [(0, 1), (1, 0)] {
            let mut run = Run::lossless(5);
            let q = make_parity(&mut run.engine, &spec(), 2).unwrap();
            run.engine.set_script(Script::fusions([FusionChoice::Bits(bits.0, bits.1)]));
            let Reencoded::Shrunk { block, leftover } = reencode_parity(&mut run, &q.blocks[0], 3).unwrap() else {
                panic!("forced failure");
            };
            assert_eq!((block.len(), leftover.len()), (1, 2));
            let order: Vec<_> = block.iter().chain(&leftover).copied().collect();
            let v = run.engine.amplitudes_in(&order).unwrap();
            let zero = crate::codes::logical_amplitudes(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &[2]);
            let want: Vec<C64> = spec()
                .amplitudes()
                .iter()
                .flat_map(|&a| zero.iter().map(move |&z| a * z))
                .collect();
            assert!(crate::qstate::fidelity(&want, &v) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn failures_down_to_a_bare_photon_keep_the_qubit() {
        let mut run = Run::lossless(8);
        let q = make_parity(&mut run.engine, &spec(), 3).unwrap();
        run.engine.set_script(Script::fusions([FusionChoice::Failure, FusionChoice::Failure]));
        let mut block = q.blocks[0].clone();
        for _ in 0..2 {
            let Reencoded::Shrunk { block: b, leftover } = reencode_parity(&mut run, &block, 2).unwrap() else {
                panic!("forced failure");
            };
            run.discard(&leftover).unwrap();
            block = b;
        }
        let got = logical_of(&run, &LogicalQubit { blocks: vec![block] });
        assert!(overlap(spec().amplitudes(), got) > 1.0 - 1e-12);
    }

    #[test]
    fn disentangling_keeps_the_remaining_block() {
        for bit in [0, 1] {
            let mut run = Run::lossless(1);
            run.engine.script_mut().measure_default = Some(bit);
            let mut q = make_redundant(&mut run.engine, &spec(), CodeLayout::new(2, 2).unwrap()).unwrap();
            assert_eq!(disentangle_block(&mut run, &mut q, 1).unwrap(), Disentangled::Removed { sign: bit });
            assert!(overlap(spec().amplitudes(), logical_of(&run, &q)) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn disentangling_tolerates_lost_photons() {
        for hidden in [0, 1] {
            let mut run = Run::lossless(2);
            run.engine.set_script(Script::default().with_hidden(hidden));
            let mut q = make_redundant(&mut run.engine, &spec(), CodeLayout::new(3, 2).unwrap()).unwrap();
            run.engine.lose(q.blocks[1][0]).unwrap();
            disentangle_block(&mut run, &mut q, 1).unwrap();
            assert!(overlap(spec().amplitudes(), logical_of(&run, &q)) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn disentangling_the_only_block_is_refused() {
        let mut run = Run::lossless(0);
        let mut q = make_parity(&mut run.engine, &spec(), 2).unwrap();
        assert!(disentangle_block(&mut run, &mut q, 0).is_err());
    }

    fn check_cycle(layout: CodeLayout, detector: Detector, seed: u64) -> (TerminalStatus, Run) {
        let mut run = Run::new(Engine::new(seed, 0), detector);
        let mut q = make_redundant(&mut run.engine, &spec(), layout).unwrap();
        let status = active_memory_cycle(&mut run, &mut q, layout).unwrap();
        if status.is_success() {
            assert_eq!(q.lens(), vec![layout.n; layout.q]);
            let got = logical_of(&run, &q);
            assert!(overlap(spec().amplitudes(), got) > 1.0 - 1e-10, "{}", run.record.to_lines());
        }
        (status, run)
    }

    #[test]
    fn lossless_cycle_is_identity() {
        for (n, q) in [(1, 1), (2, 2), (3, 2), (2, 3)] {
            let wins = (0..40)
                .filter(|&seed| check_cycle(CodeLayout::new(n, q).unwrap(), Detector::lossless(), seed).0.is_success())
                .count();
            assert!(wins > 10, "({n},{q}) {wins}/40");
        }
    }

    #[test]
    fn every_single_loss_is_survived_or_heralded() {
        let layout = CodeLayout::new(2, 2).unwrap();
        for at in 0..8 {
            for seed in 0..10 {
                for hidden in [0, 1] {
                    let mut run = Run::new(Engine::new(seed, 0), Detector::inject([at]));
                    run.engine.set_script(Script::default().with_hidden(hidden));
                    let mut q = make_redundant(&mut run.engine, &spec(), layout).unwrap();
                    if active_memory_cycle(&mut run, &mut q, layout).unwrap().is_success() {
                        let got = logical_of(&run, &q);
                        assert!(overlap(spec().amplitudes(), got) > 1.0 - 1e-10, "loss at {at}");
                    }
                }
            }
        }
    }

    #[test]
    fn first_detection_loss_is_recovered() {
        let layout = CodeLayout::new(2, 2).unwrap();
        let mut run = Run::new(Engine::new(4, 0), Detector::inject([0]));
        run.engine.set_script(Script::fusions([FusionChoice::Success]));
        let mut q = make_redundant(&mut run.engine, &spec(), layout).unwrap();
        let status = active_memory_cycle(&mut run, &mut q, layout).unwrap();
        assert_eq!(status, TerminalStatus::RecoveredThenSuccess, "{}", run.record.to_lines());
        assert_eq!(run.record.partial_failures, 1);
        assert!(overlap(spec().amplitudes(), logical_of(&run, &q)) > 1.0 - 1e-10);
    }
}
