//! The exact event tree of one memory cycle and of a CNOT.

use plqc::codes::CodeLayout;
use plqc::lossmodel::{enumerate_event_tree, EfficiencyParams, EventClass, EventTreeNode, TreeProtocol};

// Branch points carry the root class; print their children in place.
fn show(node: &EventTreeNode, depth: usize, max_depth: usize) {
    let inner = depth > 0 && node.class == EventClass::Root;
    if !inner {
        println!("{:indent$}{} p={:.4}", "", node.class, node.prob, indent = 2 * depth);
    }
    if depth < max_depth {
        let next = if inner { depth } else { depth + 1 };
        for c in &node.children {
            show(c, next, max_depth);
        }
    }
}

fn main() -> plqc::Result<()> {
    let eff = EfficiencyParams::uniform(0.9)?;
    let memory = enumerate_event_tree(TreeProtocol::Memory, CodeLayout::new(2, 2)?, &eff)?;
    show(&memory.root, 0, 6);
    println!(
        "memory (2,2): success {:.6}, {} nodes, fusion-loss mass {:.4}",
        memory.success,
        memory.nodes(),
        memory.root.mass(EventClass::FusionLoss)
    );
    let cnot = enumerate_event_tree(TreeProtocol::Cnot, CodeLayout::new(2, 2)?, &eff)?;
    println!("cnot (2,2): success {:.6}, {} nodes over {} iteration states", cnot.success, cnot.nodes(), cnot.iterations.len());
    Ok(())
}
