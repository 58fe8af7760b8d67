//! The re-encoding cascade shared by every protocol: fuse photons of one
//! block into fresh resources until a fusion succeeds, then read out the
//! rest of the block.

use crate::codes::{make_cnot_resource, make_memory_resource, Resource};
use crate::error::Result;
use crate::qstate::{Basis, Engine, FusionOutcome, PhotonId, Unitary};

use super::{Milestone, Run};

#[derive(Debug, Clone, Copy)]
pub(crate) enum Kind {
    /// Port plus `q` blocks of `n`.
    Memory { n: usize, q: usize },
    /// Port C, control block of `n`, target block of `m` plus port D.
    Cnot { n: usize, m: usize },
}

impl Kind {
    fn build(self, engine: &mut Engine) -> Result<Resource> {
        match self {
            Kind::Memory { n, q } => make_memory_resource(engine, n, q),
            Kind::Cnot { n, m } => make_cnot_resource(engine, n, m),
        }
    }
}

/// Rotation applied to the photon about to be fused.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Pre {
    pub u: Unitary,
    pub name: &'static str,
    pub angle: f64,
    /// Reapply before every attempt rather than only the first.
    pub every: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Cascade {
    pub kind: Kind,
    pub pre: Option<Pre>,
    /// Whether the new blocks may be disentangled when the whole remainder
    /// of the block is lost after a successful fusion.
    pub orphan_recoverable: bool,
}

pub(crate) enum End {
    /// The block now lives on `res.blocks`; parity and sign fixes applied.
    /// `parity` is the computational parity of the measured remainder.
    Encoded { parity: u8, res: Resource },
    /// The block was disentangled and must be dropped from the logical qubit.
    Partial,
    Failed,
}

pub(crate) fn run_cascade(run: &mut Run, block: &[PhotonId], others: &[Vec<PhotonId>], spec: &Cascade) -> Result<End> {
    let single = block.len() == 1;
    let mut a = block.to_vec();
    let mut attempt = 0;
    let mut failed = 0;
    loop {
        if a.len() == 1 && !single {
            let s = run.diag_sign(&a)?;
            return partial(run, others, s);
        }
        let res = spec.kind.build(&mut run.engine)?;
        if let Some(pre) = spec.pre.filter(|p| attempt == 0 || p.every) {
            run.gate(a[0], &pre.u, pre.name, pre.angle)?;
        }
        attempt += 1;
        let fused = a.remove(0);
        match run.fuse(fused, res.port_c)? {
            FusionOutcome::Failure { bits: (bit, _) } => {
                run.record.failed_fusions += 1;
                failed += 1;
                run.discard(&res.photons())?;
                if a.is_empty() {
                    return Ok(End::Failed);
                }
                if bit == 1 {
                    run.x(a[0])?;
                }
            }
            FusionOutcome::LossDetected { .. } => {
                run.discard(&res.photons())?;
                if a.is_empty() {
                    return Ok(End::Failed);
                }
                let s = run.diag_sign(&a)?;
                return partial(run, others, s);
            }
            FusionOutcome::Success { sign } => {
                run.record.k = failed;
                if sign < 0 {
                    run.z_all(&res.blocks[0])?;
                }
                let mut parity = 0;
                for i in 0..a.len() {
                    match run.measure(a[i], Basis::Computational)? {
                        Some(b) => parity ^= b,
                        None => return orphaned(run, &a[i + 1..], &res, others, spec),
                    }
                }
                if parity == 1 {
                    for blk in &res.blocks {
                        run.x(blk[0])?;
                    }
                }
                return Ok(End::Encoded { parity, res });
            }
        }
    }
}

/// Loss while reading out the block after a successful fusion.
fn orphaned(run: &mut Run, rest: &[PhotonId], res: &Resource, others: &[Vec<PhotonId>], spec: &Cascade) -> Result<End> {
    if let Some(s) = run.diag_sign(rest)? {
        run.discard(&res.photons())?;
        return partial(run, others, Some(s));
    }
    if !spec.orphan_recoverable {
        return Ok(End::Failed);
    }
    let mut total = 0;
    for blk in &res.blocks {
        match run.diag_sign(blk)? {
            Some(s) => total ^= s,
            None => return Ok(End::Failed),
        }
    }
    partial(run, others, Some(total))
}

fn partial(run: &mut Run, others: &[Vec<PhotonId>], sign: Option<u8>) -> Result<End> {
    let (Some(s), Some(rest)) = (sign, others.first()) else {
        return Ok(End::Failed);
    };
    if s == 1 {
        run.z_all(rest)?;
    }
    run.record.note(Milestone::PartialFailure);
    Ok(End::Partial)
}
