//! Monte Carlo over the state engine next to the exact event tree.

use plqc::analytics::p_e;
use plqc::codes::CodeLayout;
use plqc::lossmodel::{enumerate_event_tree, run_monte_carlo, EfficiencyParams, Protocol, TreeProtocol, TrialPlan};

fn main() -> plqc::Result<()> {
    let layout = CodeLayout::new(3, 2)?;
    for eta in [0.85, 0.9, 0.95] {
        let eff = EfficiencyParams::uniform(eta)?;
        let est = run_monte_carlo(&TrialPlan::new(Protocol::Memory, layout, 20_000, 42)?, &eff)?;
        let exact = enumerate_event_tree(TreeProtocol::Memory, layout, &eff)?.success;
        let closed = p_e(3, 2.0, eff.eta1(), eff.eta2())?;
        let t = est.taxonomy;
        println!(
            "eta={eta}: p_hat={:.4}±{:.4} tree={exact:.4} closed={closed:.4} clean={} recovered={} failed={}",
            est.p_hat, est.std_err, t.clean, t.recovered, t.failure
        );
    }
    Ok(())
}
