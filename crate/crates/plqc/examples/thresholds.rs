//! Efficiency thresholds of the memory and CNOT closed forms.

use plqc::analytics::{find_threshold, ProtocolKind, ThresholdConfig};

fn main() -> plqc::Result<()> {
    for kind in [ProtocolKind::Memory, ProtocolKind::Cnot] {
        let report = find_threshold(&ThresholdConfig::new(kind))?;
        match report.eta_star {
            Some(e) => println!("{kind}: eta* = {e:.4}"),
            None => println!("{kind}: no threshold in range"),
        }
    }
    // a detector-only sweep with perfect sources and memory
    let mut cfg = ThresholdConfig::new(ProtocolKind::Memory);
    cfg.eta_s = Some(1.0);
    cfg.eta_m = Some(1.0);
    let report = find_threshold(&cfg)?;
    println!("memory, detector efficiency only: eta_d* = {:?}", report.eta_star);
    Ok(())
}
