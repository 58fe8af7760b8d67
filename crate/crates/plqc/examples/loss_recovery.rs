//! Injects a single loss at every detection event of a memory cycle and
//! reports how the protocol handled it, for both hidden loss values.

use plqc::codes::{logical_projection, make_redundant, CodeLayout, LogicalQubitSpec};
use plqc::lossmodel::Detector;
use plqc::protocols::{active_memory_cycle, Run};
use plqc::qstate::{fidelity, Engine, FusionChoice, Script};

fn main() -> plqc::Result<()> {
    let layout = CodeLayout::new(2, 2)?;
    let input = LogicalQubitSpec::bloch(2.0, -0.6);
    let script = || Script::fusions(std::iter::repeat_n(FusionChoice::Success, 64));
    let mut clean = Run::new(Engine::new(0, 0), Detector::lossless());
    clean.engine.set_script(script());
    let mut q = make_redundant(&mut clean.engine, &input, layout)?;
    active_memory_cycle(&mut clean, &mut q, layout)?;
    for at in 0..clean.detector.events() {
        for hidden in [0, 1] {
            let mut run = Run::new(Engine::new(0, 0), Detector::inject([at]));
            run.engine.set_script(script().with_hidden(hidden));
            let mut q = make_redundant(&mut run.engine, &input, layout)?;
            let status = active_memory_cycle(&mut run, &mut q, layout)?;
            let f = fidelity(&input.amplitudes(), &logical_projection(&run.engine, &[&q])?);
            println!("loss at event {at}, hidden {hidden}: {status}, fidelity {f:.12}");
        }
    }
    Ok(())
}
