//! Exact enumeration of the detection and fusion events of the memory
//! cycle and the logical CNOT.
//!
//! Each fusion between a detected old and new photon succeeds or fails
//! with probability `eta1*eta2/2` and reports a loss otherwise; each
//! measured photon is seen with `eta1` (old) or `eta2` (new). The trees
//! follow the same branch logic as the protocols on the state engine, so
//! Monte Carlo over the engine converges to the numbers found here.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use super::EfficiencyParams;
use crate::codes::CodeLayout;
use crate::error::{Error, Result};
use crate::protocols::cnot::resource_target_len;

/// Largest block length the enumerator accepts.
pub const MAX_N: usize = 6;
/// Largest redundancy the enumerator accepts.
pub const MAX_Q: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventClass {
    Root,
    FusionSuccess,
    FusionFailure,
    FusionLoss,
    MeasureHit,
    MeasureMiss,
    /// At least one photon of a diagonally measured block was seen.
    BlockSeen,
    BlockLost,
    Success,
    Failure,
    /// A CNOT iteration ended in the given state; its value is that of the
    /// iteration tree rooted there.
    Continue { pending: usize, total: usize, len: usize },
}

impl fmt::Display for EventClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventClass::Continue { pending, total, len } => write!(f, "continue(pending={pending},total={total},len={len})"),
            other => {
                let name = format!("{other:?}");
                for (i, c) in name.chars().enumerate() {
                    if c.is_uppercase() && i > 0 {
                        f.write_str("_")?;
                    }
                    write!(f, "{}", c.to_ascii_lowercase())?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventTreeNode {
    pub class: EventClass,
    /// Probability of this branch given its parent.
    pub prob: f64,
    /// Identical continuations are shared, so the tree is stored as a DAG.
    pub children: Vec<Rc<EventTreeNode>>,
}

impl EventTreeNode {
    fn leaf(class: EventClass) -> Node {
        Rc::new(EventTreeNode {
            class,
            prob: 1.0,
            children: Vec::new(),
        })
    }

    fn with(class: EventClass, prob: f64, next: Node) -> Node {
        Rc::new(EventTreeNode {
            class,
            prob,
            children: vec![next],
        })
    }

    fn branches(children: Vec<Node>) -> Node {
        Rc::new(EventTreeNode {
            class: EventClass::Root,
            prob: 1.0,
            children: children.into_iter().filter(|c| c.prob > 0.0).collect(),
        })
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        fn walk(n: &EventTreeNode, seen: &mut HashSet<*const EventTreeNode>) -> usize {
            let mut count = 1;
            for c in &n.children {
                if seen.insert(Rc::as_ptr(c)) {
                    count += walk(c, seen);
                }
            }
            count
        }
        walk(self, &mut HashSet::new())
    }

    /// Largest deviation from one of a child probability sum anywhere in
    /// the tree.
    pub fn normalization_error(&self) -> f64 {
        fn walk(n: &EventTreeNode, seen: &mut HashSet<*const EventTreeNode>) -> f64 {
            if n.children.is_empty() {
                return 0.0;
            }
            let mut worst = (n.children.iter().map(|c| c.prob).sum::<f64>() - 1.0).abs();
            for c in &n.children {
                if seen.insert(Rc::as_ptr(c)) {
                    worst = worst.max(walk(c, seen));
                }
            }
            worst
        }
        walk(self, &mut HashSet::new())
    }

    /// Total probability of reaching leaves of class `class`.
    pub fn mass(&self, class: EventClass) -> f64 {
        self.fold(&mut |c| (c == class) as u8 as f64)
    }

    /// Sum over leaves of path probability times `value(leaf class)`.
    pub fn fold(&self, value: &mut impl FnMut(EventClass) -> f64) -> f64 {
        fn walk(n: &EventTreeNode, value: &mut impl FnMut(EventClass) -> f64, memo: &mut HashMap<*const EventTreeNode, f64>) -> f64 {
            if n.children.is_empty() {
                return value(n.class);
            }
            let mut sum = 0.0;
            for c in &n.children {
                let v = match memo.get(&Rc::as_ptr(c)) {
                    Some(&v) => v,
                    None => {
                        let v = walk(c, value, memo);
                        memo.insert(Rc::as_ptr(c), v);
                        v
                    }
                };
                sum += c.prob * v;
            }
            sum
        }
        walk(self, value, &mut HashMap::new())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeProtocol {
    Memory,
    Cnot,
}

/// Result of an enumeration.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub success: f64,
    /// The tree of the whole cycle (memory) or of the first iteration (CNOT).
    pub root: EventTreeNode,
    /// CNOT iteration trees by state; empty for memory.
    pub iterations: Vec<(CnotState, EventTreeNode)>,
}

impl Enumeration {
    pub fn nodes(&self) -> usize {
        self.root.size() + self.iterations.iter().map(|(_, t)| t.size()).sum::<usize>()
    }

    pub fn normalization_error(&self) -> f64 {
        self.iterations
            .iter()
            .map(|(_, t)| t.normalization_error())
            .fold(self.root.normalization_error(), f64::max)
    }
}

type Node = Rc<EventTreeNode>;

struct Probs {
    eta1: f64,
    eta2: f64,
    x: f64,
    loss: f64,
}

impl Probs {
    fn new(eff: &EfficiencyParams) -> Self {
        let (eta1, eta2) = (eff.eta1(), eff.eta2());
        Probs {
            eta1,
            eta2,
            x: eta1 * eta2 / 2.0,
            loss: 1.0 - eta1 * eta2,
        }
    }

    /// Diagonal measurement of `k` photons seen with probability `eta` each.
    fn block(&self, k: usize, eta: f64, seen: Node, lost: Node) -> Node {
        let p_lost = (1.0 - eta).powi(k as i32);
        EventTreeNode::branches(vec![
            EventTreeNode::with(EventClass::BlockSeen, 1.0 - p_lost, seen),
            EventTreeNode::with(EventClass::BlockLost, p_lost, lost),
        ])
    }

    /// Every block in `lens` must be seen, then `then`.
    fn all_seen(&self, lens: &[usize], eta: f64, then: &Node) -> Node {
        match lens.split_first() {
            None => then.clone(),
            Some((&k, rest)) => self.block(k, eta, self.all_seen(rest, eta, then), fail()),
        }
    }
}

fn fail() -> Node {
    EventTreeNode::leaf(EventClass::Failure)
}

/// Re-encoding cascade from an old block of `r >= 2` photons onto a
/// resource whose code blocks have lengths `res`. `encoded` follows a clean
/// re-encoding, `partial` the removal of the block with a known sign.
fn cascade(p: &Probs, r: usize, res: &[usize], encoded: &Node, partial: &Node) -> Node {
    let orphan = p.all_seen(res, p.eta2, partial);
    cascade_from(p, r, encoded, partial, &orphan)
}

fn cascade_from(p: &Probs, r: usize, encoded: &Node, partial: &Node, orphan: &Node) -> Node {
    let after_failure = if r > 2 {
        cascade_from(p, r - 1, encoded, partial, orphan)
    } else {
        p.block(1, p.eta1, partial.clone(), fail())
    };
    EventTreeNode::branches(vec![
        EventTreeNode::with(EventClass::FusionSuccess, p.x, readout(p, r - 1, encoded, partial, orphan)),
        EventTreeNode::with(EventClass::FusionFailure, p.x, after_failure),
        EventTreeNode::with(EventClass::FusionLoss, p.loss, p.block(r - 1, p.eta1, partial.clone(), fail())),
    ])
}

/// Computational readout of the `k` photons left after a successful fusion.
/// After a miss the rest of the block is measured diagonally, and if none
/// of it is seen every resource block has to be read instead.
fn readout(p: &Probs, k: usize, encoded: &Node, partial: &Node, orphan: &Node) -> Node {
    if k == 0 {
        return encoded.clone();
    }
    EventTreeNode::branches(vec![
        EventTreeNode::with(EventClass::MeasureHit, p.eta1, readout(p, k - 1, encoded, partial, orphan)),
        EventTreeNode::with(EventClass::MeasureMiss, 1.0 - p.eta1, p.block(k - 1, p.eta1, partial.clone(), orphan.clone())),
    ])
}

/// Memory cycle over `blocks` old blocks of `n` photons with a resource of
/// `q_res` blocks, continuing with `then` on success.
fn memory_cycle(p: &Probs, n: usize, blocks: usize, q_res: usize, then: &Node) -> Node {
    let res = vec![n; q_res];
    // Built from the last attempt backwards; each attempt's partial branch
    // is the next attempt.
    let mut next = fail();
    for j in (0..blocks).rev() {
        let encoded = p.all_seen(&vec![n; blocks - 1 - j], p.eta1, then);
        next = cascade(p, n, &res, &encoded, &next);
    }
    next
}

fn check_size(layout: CodeLayout) -> Result<()> {
    if layout.n < 2 || layout.n > MAX_N || layout.q > MAX_Q {
        return Err(Error::Domain(format!(
            "enumeration supports 2 <= n <= {MAX_N}, q <= {MAX_Q}; got ({}, {})",
            layout.n, layout.q
        )));
    }
    Ok(())
}

pub fn enumerate_event_tree(protocol: TreeProtocol, layout: CodeLayout, eff: &EfficiencyParams) -> Result<Enumeration> {
    check_size(layout)?;
    let p = Probs::new(eff);
    match protocol {
        TreeProtocol::Memory => {
            let root = memory_cycle(&p, layout.n, layout.q, layout.q, &EventTreeNode::leaf(EventClass::Success));
            Ok(Enumeration {
                success: root.mass(EventClass::Success),
                root: Rc::unwrap_or_clone(root),
                iterations: Vec::new(),
            })
        }
        TreeProtocol::Cnot => Ok(enumerate_cnot(&p, layout)),
    }
}

/// `(pending, total, len)`: target blocks still to be merged, target blocks
/// left, photons in the current target block.
pub type CnotState = (usize, usize, usize);

fn cnot_iteration(p: &Probs, layout: CodeLayout, (pending, total, len): CnotState) -> Node {
    let n = layout.n;
    let m = resource_target_len(n);
    let next = |pending: usize, total: usize, len: usize| {
        if total == 0 {
            fail()
        } else if pending == 0 {
            EventTreeNode::leaf(EventClass::Success)
        } else {
            EventTreeNode::leaf(EventClass::Continue { pending, total, len })
        }
    };
    let shrunk = if len > 1 { next(pending, total, len - 1) } else { fail() };
    let dropped = if len > 1 {
        p.block(len - 1, p.eta1, next(pending - 1, total - 1, n), fail())
    } else {
        fail()
    };
    let target_fusion = EventTreeNode::branches(vec![
        EventTreeNode::with(EventClass::FusionSuccess, p.x, next(pending - 1, total, n)),
        EventTreeNode::with(EventClass::FusionFailure, p.x, p.block(m, p.eta2, shrunk, fail())),
        EventTreeNode::with(EventClass::FusionLoss, p.loss, p.block(m, p.eta2, dropped, fail())),
    ]);
    // A partial re-encoding removes a control block; the control is then
    // restored by a memory cycle and the iteration made no progress.
    let partial = if layout.q >= 2 {
        memory_cycle(p, n, layout.q - 1, layout.q, &next(pending, total, len))
    } else {
        fail()
    };
    cascade(p, n, &[n, m + 1], &target_fusion, &partial)
}

fn enumerate_cnot(p: &Probs, layout: CodeLayout) -> Enumeration {
    let start = (layout.q, layout.q, layout.n);
    let mut trees = HashMap::new();
    let mut values = HashMap::new();
    let success = cnot_value(p, layout, start, &mut trees, &mut values);
    let root = trees.remove(&start).expect("start state enumerated");
    let mut iterations: Vec<_> = trees.into_iter().collect();
    iterations.sort_by_key(|(s, _)| std::cmp::Reverse(*s));
    Enumeration {
        success,
        root: Rc::unwrap_or_clone(root),
        iterations: iterations.into_iter().map(|(s, t)| (s, Rc::unwrap_or_clone(t))).collect(),
    }
}

/// Success probability from state `s`. Every transition either returns to
/// `s` or strictly shrinks the target, so the self loop is summed as a
/// geometric series.
fn cnot_value(p: &Probs, layout: CodeLayout, s: CnotState, trees: &mut HashMap<CnotState, Node>, values: &mut HashMap<CnotState, f64>) -> f64 {
    if let Some(&v) = values.get(&s) {
        return v;
    }
    let tree = cnot_iteration(p, layout, s);
    let mut successors = Vec::new();
    tree.fold(&mut |c| {
        if let EventClass::Continue { pending, total, len } = c {
            if (pending, total, len) != s && !successors.contains(&(pending, total, len)) {
                successors.push((pending, total, len));
            }
        }
        0.0
    });
    for t in successors {
        cnot_value(p, layout, t, trees, values);
    }
    let direct = tree.fold(&mut |c| match c {
        EventClass::Success => 1.0,
        EventClass::Continue { pending, total, len } if (pending, total, len) != s => values[&(pending, total, len)],
        _ => 0.0,
    });
    let self_loop = tree.mass(EventClass::Continue {
        pending: s.0,
        total: s.1,
        len: s.2,
    });
    let v = if self_loop < 1.0 { direct / (1.0 - self_loop) } else { 0.0 };
    values.insert(s, v);
    trees.insert(s, tree);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{p_e, p_ff, p_qs};

    fn layout(n: usize, q: usize) -> CodeLayout {
        CodeLayout::new(n, q).unwrap()
    }

    #[test]
    fn memory_matches_closed_form() {
        for eta in [0.8, 0.9, 0.95, 1.0] {
            let eff = EfficiencyParams::uniform(eta).unwrap();
            for n in 2..=4 {
                for q in 1..=3 {
                    let e = enumerate_event_tree(TreeProtocol::Memory, layout(n, q), &eff).unwrap();
                    let want = p_e(n, q as f64, eff.eta1(), eff.eta2()).unwrap();
                    assert!((e.success - want).abs() < 1e-12, "{eta} ({n},{q}): {} vs {want}", e.success);
                    assert!(e.normalization_error() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_block_split_into_three_outcomes() {
        // With q = 1 the partial branch is a failure, so failure mass is
        // 1 - P_Qs and success is exactly P_Qs.
        let eff = EfficiencyParams::new(0.97, 0.9, 0.93).unwrap();
        let e = enumerate_event_tree(TreeProtocol::Memory, layout(3, 1), &eff).unwrap();
        let pqs = p_qs(3, eff.eta1(), eff.eta2()).unwrap();
        assert!((e.success - pqs).abs() < 1e-14);
        assert!((e.root.mass(EventClass::Failure) - (1.0 - pqs)).abs() < 1e-14);
        assert!(p_ff(3, 1.0, eff.eta1(), eff.eta2()).unwrap() < 1.0 - pqs);
    }

    #[test]
    fn lossless_memory_limit() {
        for n in 2..=6 {
            for q in 1..=4 {
                let e = enumerate_event_tree(TreeProtocol::Memory, layout(n, q), &EfficiencyParams::perfect()).unwrap();
                let want = 1.0 - 0.5f64.powi(((n - 1) * q) as i32);
                assert!((e.success - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cnot_is_a_probability() {
        for eta in [0.8, 0.95, 1.0] {
            let eff = EfficiencyParams::uniform(eta).unwrap();
            for n in 2..=4 {
                for q in 1..=3 {
                    let e = enumerate_event_tree(TreeProtocol::Cnot, layout(n, q), &eff).unwrap();
                    assert!((0.0..=1.0).contains(&e.success));
                    assert!(e.normalization_error() < 1e-12);
                }
            }
        }
    }

    /// Lossless (2,1): the control cascade succeeds with 1/2, then the
    /// target fusion with 1/2; a target fusion failure leaves one photon,
    /// whose next failure ends the run.
    #[test]
    fn cnot_lossless_small_case() {
        let e = enumerate_event_tree(TreeProtocol::Cnot, layout(2, 1), &EfficiencyParams::perfect()).unwrap();
        // v(2) = 1/2 (1/2 + 1/2 v(1)), v(1) = 1/4
        assert!((e.success - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn size_bound() {
        let eff = EfficiencyParams::perfect();
        assert!(enumerate_event_tree(TreeProtocol::Memory, layout(7, 1), &eff).is_err());
        assert!(enumerate_event_tree(TreeProtocol::Cnot, layout(2, 5), &eff).is_err());
        let eff = EfficiencyParams::uniform(0.9).unwrap();
        for protocol in [TreeProtocol::Memory, TreeProtocol::Cnot] {
            let big = enumerate_event_tree(protocol, layout(6, 4), &eff).unwrap();
            assert!(big.nodes() > 200, "{}", big.nodes());
            assert!(big.normalization_error() < 1e-12);
        }
    }
}
