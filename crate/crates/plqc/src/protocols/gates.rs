//! Logical `Z_theta` and `X_90` by rotating one photon before re-encoding.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::codes::{CodeLayout, LogicalQubit};
use crate::error::{Error, Result};
use crate::qstate::{gate, Age};

use super::cascade::{run_cascade, Cascade, End, Kind, Pre};
use super::memory::cycle;
use super::{intact, pauli_x_logical, pauli_z_logical, Milestone, Run, TerminalStatus};

const ANGLE_EPS: f64 = 1e-12;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() < ANGLE_EPS
}

fn check_layout(run: &Run, q: &LogicalQubit, layout: CodeLayout) -> Result<()> {
    if q.lens() != vec![layout.n; layout.q] {
        return Err(Error::Precondition(format!("qubit has blocks {:?}, layout is {layout:?}", q.lens())));
    }
    q.blocks.iter().try_for_each(|b| intact(run, b))
}

/// Applies `diag(1, e^{i theta})` to the logical qubit. An odd parity on
/// the measured block leaves `Z_{-theta}` behind, which the next attempt
/// cancels with twice the residual angle.
pub fn z_theta_logical(run: &mut Run, q: &mut LogicalQubit, layout: CodeLayout, theta: f64) -> Result<TerminalStatus> {
    check_layout(run, q, layout)?;
    let mut residual = theta.rem_euclid(TAU);
    loop {
        if near(residual, 0.0) || near(residual, TAU) {
            return Ok(run.succeed());
        }
        if near(residual, PI) {
            pauli_z_logical(run, q)?;
            return Ok(run.succeed());
        }
        if run.record.gate_attempts >= run.budget.gate_attempts {
            return Err(Error::Budget(run.record.gate_attempts));
        }
        run.record.gate_attempts += 1;
        let spec = Cascade {
            kind: Kind::Memory { n: layout.n, q: 1 },
            pre: Some(Pre {
                u: gate::z_theta(residual),
                name: "z_theta",
                angle: residual,
                every: true,
            }),
            orphan_recoverable: false,
        };
        let block = q.blocks[0].clone();
        let end = run_cascade(run, &block, &q.blocks[1..], &spec)?;
        run.engine.age_all(Age::Old);
        match end {
            End::Encoded { parity, mut res } => {
                q.blocks[0] = res.blocks.remove(0);
                if parity == 0 {
                    return Ok(run.succeed());
                }
                residual = (2.0 * residual).rem_euclid(TAU);
                run.record.note(Milestone::Retry { residual });
            }
            End::Partial => {
                q.blocks.remove(0);
                if !restore(run, q, layout)? {
                    return Ok(run.fail());
                }
            }
            End::Failed => return Ok(run.fail()),
        }
    }
}

/// Applies `X_90 = (I - iX)/sqrt(2)` up to a global phase.
pub fn x90_logical(run: &mut Run, q: &mut LogicalQubit, layout: CodeLayout) -> Result<TerminalStatus> {
    check_layout(run, q, layout)?;
    let spec = Cascade {
        kind: Kind::Memory { n: layout.n, q: layout.q },
        pre: Some(Pre {
            u: gate::x_theta(FRAC_PI_2),
            name: "x_theta",
            angle: FRAC_PI_2,
            every: false,
        }),
        orphan_recoverable: true,
    };
    loop {
        if run.record.gate_attempts >= run.budget.gate_attempts {
            return Err(Error::Budget(run.record.gate_attempts));
        }
        run.record.gate_attempts += 1;
        let block = q.blocks[0].clone();
        match run_cascade(run, &block, &q.blocks[1..], &spec)? {
            End::Encoded { res, .. } => {
                // An odd number of minus signs among the old blocks leaves
                // X_90 conjugated by Z, which XZ undoes up to phase.
                let mut minus = 0;
                for other in &q.blocks[1..] {
                    match run.diag_sign(other)? {
                        Some(s) => minus ^= s,
                        None => {
                            run.engine.age_all(Age::Old);
                            return Ok(run.fail());
                        }
                    }
                }
                q.blocks = res.blocks;
                if minus == 1 {
                    pauli_x_logical(run, q)?;
                    pauli_z_logical(run, q)?;
                }
                run.engine.age_all(Age::Old);
                return Ok(run.succeed());
            }
            End::Partial => {
                run.engine.age_all(Age::Old);
                q.blocks.remove(0);
                if !restore(run, q, layout)? {
                    return Ok(run.fail());
                }
            }
            End::Failed => {
                run.engine.age_all(Age::Old);
                return Ok(run.fail());
            }
        }
    }
}

/// Memory cycle back to the full layout after a block was dropped.
fn restore(run: &mut Run, q: &mut LogicalQubit, layout: CodeLayout) -> Result<bool> {
    let ok = cycle(run, q, layout)?;
    if ok {
        run.record.note(Milestone::MemoryRestored);
    }
    Ok(ok)
}
