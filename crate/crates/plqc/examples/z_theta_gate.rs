//! Logical Z rotations. An odd readout parity leaves the conjugate
//! rotation, so the gate retries with twice the residual angle; Z90 needs
//! at most one retry because Z180 is a Pauli.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use plqc::codes::{logical_projection, make_redundant, CodeLayout, LogicalQubitSpec};
use plqc::lossmodel::Detector;
use plqc::protocols::{z_theta_logical, Run};
use plqc::qstate::{fidelity, gate, Engine};

fn main() -> plqc::Result<()> {
    let layout = CodeLayout::new(2, 2)?;
    let input = LogicalQubitSpec::plus();
    for theta in [FRAC_PI_4, FRAC_PI_2, 0.3] {
        let u = gate::z_theta(theta);
        let a = input.amplitudes();
        let want = [u[0][0] * a[0] + u[0][1] * a[1], u[1][0] * a[0] + u[1][1] * a[1]];
        for seed in 0..4 {
            let mut run = Run::new(Engine::new(seed, 0), Detector::lossless());
            let mut q = make_redundant(&mut run.engine, &input, layout)?;
            let status = z_theta_logical(&mut run, &mut q, layout, theta)?;
            let f = if status.is_success() {
                format!("{:.12}", fidelity(&want, &logical_projection(&run.engine, &[&q])?))
            } else {
                "n/a".into()
            };
            println!(
                "theta={theta:.4} seed={seed} status={status} attempts={} fusions={} fidelity={f}",
                run.record.gate_attempts, run.record.fusion_attempts
            );
        }
    }
    Ok(())
}
