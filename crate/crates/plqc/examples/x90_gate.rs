//! Logical X90 on a (2,3) code: four applications return the input.

use plqc::codes::{logical_projection, make_redundant, CodeLayout, LogicalQubitSpec};
use plqc::lossmodel::Detector;
use plqc::protocols::{x90_logical, Run};
use plqc::qstate::{fidelity, Engine};

fn main() -> plqc::Result<()> {
    let layout = CodeLayout::new(2, 3)?;
    let input = LogicalQubitSpec::bloch(0.7, 1.9);
    let mut done = 0;
    for seed in 0..40 {
        let mut run = Run::new(Engine::new(seed, 0), Detector::lossless());
        let mut q = make_redundant(&mut run.engine, &input, layout)?;
        let mut ok = true;
        for _ in 0..4 {
            ok &= x90_logical(&mut run, &mut q, layout)?.is_success();
            if !ok {
                break;
            }
        }
        if ok {
            let f = fidelity(&input.amplitudes(), &logical_projection(&run.engine, &[&q])?);
            println!("seed {seed}: X90^4 fidelity {f:.12} after {} fusions", run.record.fusion_attempts);
            done += 1;
        }
    }
    println!("{done} of 40 runs completed all four gates");
    Ok(())
}
