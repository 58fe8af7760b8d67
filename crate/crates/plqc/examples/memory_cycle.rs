//! One active-memory cycle on a (3,2) code, lossless then at 90% efficiency,
//! printing the event log and the recovered logical amplitudes.

use plqc::codes::{logical_projection, make_redundant, CodeLayout, LogicalQubitSpec};
use plqc::lossmodel::{Detector, EfficiencyParams};
use plqc::protocols::{active_memory_cycle, Run};
use plqc::qstate::{fidelity, Engine};

fn main() -> plqc::Result<()> {
    let layout = CodeLayout::new(3, 2)?;
    let input = LogicalQubitSpec::bloch(1.0, 0.5);
    for (label, eff) in [("lossless", EfficiencyParams::perfect()), ("eta=0.9", EfficiencyParams::uniform(0.9)?)] {
        for seed in 0..3 {
            let mut run = Run::new(Engine::new(seed, 0), Detector::random(eff, seed, 0));
            let mut q = make_redundant(&mut run.engine, &input, layout)?;
            let status = active_memory_cycle(&mut run, &mut q, layout)?;
            println!("== {label} seed {seed}: {status}");
            print!("{}", run.record.to_lines());
            if status.is_success() {
                let got = logical_projection(&run.engine, &[&q])?;
                println!("fidelity {:.12}", fidelity(&input.amplitudes(), &got));
            }
        }
    }
    Ok(())
}
