//! Expected Bell-pair cost of the parity and redundancy resource states.
//!
//! Small parity states are grown from Bell pairs with type-I fusion, which
//! destroys both inputs on failure. Longer states are chained with type-II
//! fusion, whose failure only removes one photon from each input. Costs
//! assume lossless construction.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Success probability of the type-I and type-II fusion gates.
pub const P_FUSION: f64 = 0.5;
/// Default success probability of the two-photon entangling gate that
/// makes the two-block resource.
pub const P_ENTANGLE: f64 = 0.5;
/// Default Bell-pair cost charged for one attempt of that gate.
pub const ENTANGLE_STEP_COST: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionType {
    TypeI,
    TypeII,
}

impl fmt::Display for FusionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionType::TypeI => "type-I",
            FusionType::TypeII => "type-II",
        })
    }
}

/// How one parity state is assembled.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitTree {
    Bell,
    /// `|0>^(a+b-1)` from `|0>^(a)` and `|0>^(b)`.
    Join {
        size: usize,
        cost: f64,
        fusion: FusionType,
        left: Box<SplitTree>,
        right: Box<SplitTree>,
    },
}

impl SplitTree {
    pub fn size(&self) -> usize {
        match self {
            SplitTree::Bell => 2,
            SplitTree::Join { size, .. } => *size,
        }
    }

    pub fn cost(&self) -> f64 {
        match self {
            SplitTree::Bell => 1.0,
            SplitTree::Join { cost, .. } => *cost,
        }
    }

    /// Indented text rendering, one join per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.render(0, &mut out);
        out
    }

    fn render(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match self {
            SplitTree::Bell => out.push_str(&format!("{pad}bell |0>^(2) cost=1\n")),
            SplitTree::Join {
                size,
                cost,
                fusion,
                left,
                right,
            } => {
                out.push_str(&format!(
                    "{pad}{fusion} |0>^({size}) = ({}) + ({}) cost={cost}\n",
                    left.size(),
                    right.size()
                ));
                left.render(depth + 1, out);
                right.render(depth + 1, out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostPlan {
    pub target: String,
    pub expected_bell_pairs: f64,
    /// Construction tree of the parity state involved, when there is one.
    pub tree: Option<SplitTree>,
    /// Extra `key=value` facts about the construction.
    pub notes: Vec<(String, String)>,
}

impl fmt::Display for CostPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target={}", self.target)?;
        for (k, v) in &self.notes {
            writeln!(f, "{k}={v}")?;
        }
        if let Some(t) = &self.tree {
            let mut s = String::new();
            t.render(0, &mut s);
            f.write_str(&s)?;
        }
        write!(f, "expected_bell_pairs={}", self.expected_bell_pairs)
    }
}

fn check_p(name: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("{name} = {p} must be in (0, 1]")));
    }
    Ok(())
}

/// Optimal type-I costs `C(2..=n)` with the chosen split `a` for each size
/// (`b = size + 1 - a`, `a <= b`).
fn parity_table(n: usize, p_i: f64) -> (Vec<f64>, Vec<usize>) {
    let mut cost = vec![f64::INFINITY; n + 1];
    let mut split = vec![0; n + 1];
    cost[2] = 1.0;
    for size in 3..=n {
        for a in 2..=size.div_ceil(2) {
            let c = (cost[a] + cost[size + 1 - a]) / p_i;
            if c < cost[size] {
                cost[size] = c;
                split[size] = a;
            }
        }
    }
    (cost, split)
}

fn build_tree(size: usize, cost: &[f64], split: &[usize]) -> SplitTree {
    if size == 2 {
        return SplitTree::Bell;
    }
    let a = split[size];
    SplitTree::Join {
        size,
        cost: cost[size],
        fusion: FusionType::TypeI,
        left: Box::new(build_tree(a, cost, split)),
        right: Box::new(build_tree(size + 1 - a, cost, split)),
    }
}

/// Cheapest type-I construction of `|0>^(n)` and its tree.
pub fn parity_cost_with(n: usize, p_i: f64) -> Result<(f64, SplitTree)> {
    if n < 2 {
        return Err(Error::Domain(format!("parity state needs n >= 2, got {n}")));
    }
    check_p("p_I", p_i)?;
    let (cost, split) = parity_table(n, p_i);
    Ok((cost[n], build_tree(n, &cost, &split)))
}

pub fn parity_cost(n: usize) -> Result<(f64, SplitTree)> {
    parity_cost_with(n, P_FUSION)
}

/// Minimum over every split tree, without sharing subproblems.
pub fn parity_cost_brute_force(n: usize, p_i: f64) -> f64 {
    if n == 2 {
        return 1.0;
    }
    (2..n)
        .map(|a| (parity_cost_brute_force(a, p_i) + parity_cost_brute_force(n + 1 - a, p_i)) / p_i)
        .fold(f64::INFINITY, f64::min)
}

/// Type-I cost with a bare photon counted as free.
fn block_cost(n: usize, p_i: f64) -> f64 {
    if n < 2 {
        0.0
    } else {
        parity_table(n, p_i).0[n]
    }
}

/// States of the type-II chain: the chain under construction (0 for none)
/// and the segment waiting to be fused onto it (0 for none).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ChainState {
    chain: usize,
    segment: usize,
}

/// Parameters of the chaining process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainModel {
    pub target: usize,
    pub segment: usize,
    pub p_i: f64,
    pub p_ii: f64,
}

enum ChainStep {
    /// Buy a fresh segment at `segment_cost` and move on.
    Buy(ChainState),
    /// Fuse: success leads to the first state (`None` once the target is
    /// reached), failure to the second.
    Fuse(Option<ChainState>, ChainState),
}

impl ChainModel {
    pub fn new(target: usize, segment: usize) -> Result<Self> {
        Self::with(target, segment, P_FUSION, P_FUSION)
    }

    pub fn with(target: usize, segment: usize, p_i: f64, p_ii: f64) -> Result<Self> {
        if segment < 3 {
            return Err(Error::Domain(format!("segment size must be >= 3, got {segment}")));
        }
        if target < 2 {
            return Err(Error::Domain(format!("target size must be >= 2, got {target}")));
        }
        check_p("p_I", p_i)?;
        check_p("p_II", p_ii)?;
        Ok(ChainModel {
            target,
            segment,
            p_i,
            p_ii,
        })
    }

    fn segment_cost(&self) -> f64 {
        block_cost(self.segment, self.p_i)
    }

    /// A fused pair shrinks by one photon each on failure. The longer
    /// survivor keeps growing; the shorter is reused while fusing it can
    /// still add a photon, and anything shorter than a Bell pair is dropped.
    fn step(&self, s: ChainState) -> ChainStep {
        if s.chain == 0 {
            return ChainStep::Buy(ChainState {
                chain: self.segment,
                segment: s.segment,
            });
        }
        if s.segment == 0 {
            return ChainStep::Buy(ChainState {
                chain: s.chain,
                segment: self.segment,
            });
        }
        let joined = s.chain + s.segment - 2;
        let ok = (joined < self.target).then_some(ChainState { chain: joined, segment: 0 });
        let (a, b) = (s.chain - 1, s.segment - 1);
        let (long, short) = (a.max(b), a.min(b));
        let failed = ChainState {
            chain: if long >= 2 { long } else { 0 },
            segment: if short >= 3 { short } else { 0 },
        };
        ChainStep::Fuse(ok, failed)
    }

    fn is_done(&self, s: ChainState) -> bool {
        s.chain >= self.target
    }

    /// Expected Bell pairs to reach `|0>^(target)`, by solving the
    /// absorbing chain `(I - Q) x = c` over all reachable states.
    pub fn expected_cost(&self) -> f64 {
        let start = ChainState { chain: 0, segment: 0 };
        if self.segment >= self.target {
            return self.segment_cost();
        }
        let mut index = HashMap::new();
        let mut order = vec![start];
        index.insert(start, 0);
        let mut k = 0;
        while k < order.len() {
            let s = order[k];
            k += 1;
            let next: Vec<ChainState> = match self.step(s) {
                ChainStep::Buy(t) => vec![t],
                ChainStep::Fuse(ok, failed) => ok.into_iter().chain([failed]).collect(),
            };
            for t in next {
                if !self.is_done(t) && !index.contains_key(&t) {
                    index.insert(t, order.len());
                    order.push(t);
                }
            }
        }
        let m = order.len();
        let mut a = DMatrix::<f64>::identity(m, m);
        let mut c = DVector::<f64>::zeros(m);
        let add = |i: usize, t: ChainState, w: f64, a: &mut DMatrix<f64>| {
            if !self.is_done(t) {
                a[(i, index[&t])] -= w;
            }
        };
        for (i, &s) in order.iter().enumerate() {
            match self.step(s) {
                ChainStep::Buy(t) => {
                    c[i] = self.segment_cost();
                    add(i, t, 1.0, &mut a);
                }
                ChainStep::Fuse(ok, failed) => {
                    if let Some(t) = ok {
                        add(i, t, self.p_ii, &mut a);
                    }
                    add(i, failed, 1.0 - self.p_ii, &mut a);
                }
            }
        }
        let x = a.lu().solve(&c).expect("absorbing chain reaches the target");
        x[0]
    }

    /// One random run of the chaining process; returns Bell pairs spent.
    pub fn sample(&self, rng: &mut Stream) -> f64 {
        let mut s = ChainState { chain: 0, segment: 0 };
        let mut spent = 0.0;
        if self.segment >= self.target {
            return self.segment_cost();
        }
        loop {
            match self.step(s) {
                ChainStep::Buy(t) => {
                    spent += self.segment_cost();
                    s = t;
                }
                ChainStep::Fuse(ok, failed) => {
                    if rng.bernoulli(self.p_ii) {
                        match ok {
                            Some(t) => s = t,
                            None => return spent,
                        }
                    } else {
                        s = failed;
                    }
                }
            }
            if self.is_done(s) {
                return spent;
            }
        }
    }
}

impl ChainModel {
    pub fn plan(&self) -> Result<CostPlan> {
        let (_, tree) = parity_cost_with(self.segment, self.p_i)?;
        Ok(CostPlan {
            target: format!("|0>^({})", self.target),
            expected_bell_pairs: self.expected_cost(),
            tree: Some(tree),
            notes: vec![
                ("segment".into(), format!("|0>^({})", self.segment)),
                ("join".into(), FusionType::TypeII.to_string()),
            ],
        })
    }
}

/// Expected cost of `|0>^(target)` chained from type-I built segments.
pub fn chain_cost_type_ii(target: usize, segment: usize) -> Result<CostPlan> {
    ChainModel::new(target, segment)?.plan()
}

/// Parameters of the redundancy resource construction. Each two-block
/// seed `|0>|0>^(n)|0>^(n) + |1>|1>^(n)|1>^(n)` comes from an entangling
/// gate between `|0>^(n+1)` and `|0>^(n)`. Seeds are then added one at a
/// time: the port of a fresh seed is fused into a sacrificial block of the
/// growing state, whose remaining photons are measured out on success. A
/// failure destroys the fresh seed and removes one photon from the
/// sacrificial block; a block down to one photon is measured off
/// diagonally instead of being fused, unless every block is a single photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedundancyModel {
    pub n: usize,
    pub q: usize,
    pub p_i: f64,
    pub p_ii: f64,
    pub p_c: f64,
    pub step_cost: f64,
}

impl RedundancyModel {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        Self::with(n, q, P_FUSION, P_FUSION, P_ENTANGLE, ENTANGLE_STEP_COST)
    }

    pub fn with(n: usize, q: usize, p_i: f64, p_ii: f64, p_c: f64, step_cost: f64) -> Result<Self> {
        if n < 1 || q < 2 {
            return Err(Error::Domain(format!("redundancy resource needs n >= 1, q >= 2; got ({n}, {q})")));
        }
        check_p("p_I", p_i)?;
        check_p("p_II", p_ii)?;
        check_p("p_c", p_c)?;
        if !(step_cost >= 0.0 && step_cost.is_finite()) {
            return Err(Error::Domain(format!("step cost {step_cost} must be finite and >= 0")));
        }
        Ok(RedundancyModel {
            n,
            q,
            p_i,
            p_ii,
            p_c,
            step_cost,
        })
    }

    /// Bell pairs spent on one attempt of the entangling gate.
    fn attempt_cost(&self) -> f64 {
        block_cost(self.n + 1, self.p_i) + block_cost(self.n, self.p_i) + self.step_cost
    }

    /// Expected cost of one two-block seed.
    pub fn seed_cost(&self) -> f64 {
        self.attempt_cost() / self.p_c
    }

    /// State `(blocks, r)`: blocks in the growing state (0 = none yet) and
    /// photons left in its sacrificial block.
    fn transitions(&self, blocks: usize, r: usize) -> Vec<(f64, f64, (usize, usize))> {
        let n = self.n;
        if blocks == 0 {
            return vec![(1.0, self.seed_cost(), (2, n))];
        }
        if r == 1 && n > 1 {
            // measured off diagonally
            return vec![(1.0, 0.0, (blocks - 1, n))];
        }
        // failing on a block's last photon reads its parity and collapses
        // the growing state
        let fail = if r > 1 { (blocks, r - 1) } else { (0, n) };
        vec![
            (self.p_ii, self.seed_cost(), (blocks + 1, n)),
            (1.0 - self.p_ii, self.seed_cost(), fail),
        ]
    }

    /// Expected Bell pairs for `|0>|0>^(n,q) + |1>|1>^(n,q)`.
    pub fn expected_cost(&self) -> f64 {
        let states: Vec<(usize, usize)> = std::iter::once((0, self.n))
            .chain((1..self.q).flat_map(|b| (1..=self.n).map(move |r| (b, r))))
            .collect();
        let index: HashMap<_, _> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let m = states.len();
        let mut a = DMatrix::<f64>::identity(m, m);
        let mut c = DVector::<f64>::zeros(m);
        for (i, &(b, r)) in states.iter().enumerate() {
            for (p, cost, (b2, r2)) in self.transitions(b, r) {
                c[i] += p * cost;
                if b2 < self.q {
                    let key = if b2 == 0 { (0, self.n) } else { (b2, r2) };
                    a[(i, index[&key])] -= p;
                }
            }
        }
        let x = a.lu().solve(&c).expect("construction terminates");
        x[0]
    }

    /// One random construction; returns Bell pairs spent.
    pub fn sample(&self, rng: &mut Stream) -> f64 {
        let (mut b, mut r) = (0, self.n);
        let mut spent = 0.0;
        while b < self.q {
            // every seed needs a successful entangling gate
            let trs = self.transitions(b, r);
            let pick = if trs.len() == 1 || rng.bernoulli(trs[0].0) { trs[0] } else { trs[1] };
            spent += if pick.1 > 0.0 { self.sample_seed(rng) } else { 0.0 };
            (b, r) = pick.2;
            if b == 0 {
                r = self.n;
            }
        }
        spent
    }

    fn sample_seed(&self, rng: &mut Stream) -> f64 {
        let mut spent = self.attempt_cost();
        while !rng.bernoulli(self.p_c) {
            spent += self.attempt_cost();
        }
        spent
    }
}

impl RedundancyModel {
    pub fn plan(&self) -> CostPlan {
        let (n, q) = (self.n, self.q);
        CostPlan {
            target: format!("|0>|0>^({n},{q}) + |1>|1>^({n},{q})"),
            expected_bell_pairs: self.expected_cost(),
            tree: None,
            notes: vec![
                ("seed".into(), format!("|0>|0>^({n},2) + |1>|1>^({n},2)")),
                ("seed_cost".into(), self.seed_cost().to_string()),
                ("join".into(), FusionType::TypeII.to_string()),
            ],
        }
    }
}

pub fn redundancy_resource_cost(n: usize, q: usize) -> Result<CostPlan> {
    Ok(RedundancyModel::new(n, q)?.plan())
}

/// Mean and standard error of `trials` samples drawn from `sample`.
pub fn sample_mean(trials: usize, mut sample: impl FnMut() -> f64) -> (f64, f64) {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..trials {
        let x = sample();
        s += x;
        s2 += x * x;
    }
    let n = trials as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}
