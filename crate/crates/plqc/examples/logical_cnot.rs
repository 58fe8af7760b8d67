//! Logical CNOT between two (2,2) codes: |+>|0> becomes a Bell pair.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use plqc::codes::{logical_projection, make_redundant, CodeLayout, LogicalQubitSpec};
use plqc::lossmodel::Detector;
use plqc::protocols::{cnot_logical, Run};
use plqc::qstate::{fidelity, Engine};

fn main() -> plqc::Result<()> {
    let layout = CodeLayout::new(2, 2)?;
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let bell = [r, C64::new(0.0, 0.0), C64::new(0.0, 0.0), r];
    for seed in 0..12 {
        let mut run = Run::new(Engine::new(seed, 0), Detector::lossless());
        let mut ctrl = make_redundant(&mut run.engine, &LogicalQubitSpec::plus(), layout)?;
        let mut tgt = make_redundant(&mut run.engine, &LogicalQubitSpec::zero(), layout)?;
        let status = cnot_logical(&mut run, &mut ctrl, &mut tgt, layout)?;
        let rec = &run.record;
        print!("seed {seed}: {status} fusions={} no_progress={} partial={}", rec.fusion_attempts, rec.no_progress, rec.partial_failures);
        if status.is_success() {
            let got = logical_projection(&run.engine, &[&ctrl, &tgt])?;
            print!(" bell fidelity {:.12}", fidelity(&bell, &got));
        }
        println!();
    }
    Ok(())
}
