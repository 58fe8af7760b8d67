//! How many parity blocks to use: q*(n) and the success it buys.

use plqc::analytics::optimal_q;
use plqc::lossmodel::EfficiencyParams;

fn main() -> plqc::Result<()> {
    for eta in [0.8, 0.85, 0.9, 0.95] {
        let e = EfficiencyParams::uniform(eta)?;
        println!("eta = {eta}");
        for n in [4, 8, 16, 32, 64] {
            let o = optimal_q(n, e.eta1(), e.eta2())?;
            println!("  n={n:>2} q*={:<22} P_E={:.6} (continuous q = {:.4e})", o.q, o.p_e, o.q_continuous);
        }
    }
    Ok(())
}
