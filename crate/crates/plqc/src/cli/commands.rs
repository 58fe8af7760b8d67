use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{Analytic, CliError, Command, Cost, EnumerateArgs, EtaArgs, McArgs, StatevecArgs, StatevecOp, ThresholdArgs, TreeKind, BUILD};
use crate::analytics::{find_threshold, m_terms, optimal_q_with, p_e, p_total, MemoryModel, ProtocolKind, ThresholdConfig};
use crate::codes::{choi_state, logical_projection, make_choi_pair, CodeLayout, LogicalQubit};
use crate::lossmodel::{enumerate_event_tree, run_monte_carlo, Detector, EfficiencyParams, Protocol, TreeProtocol, TrialPlan};
use crate::protocols::{active_memory_cycle, cnot_logical, x90_logical, z_theta_logical, Run};
use crate::qstate::{fidelity, gate, Engine, Unitary};
use crate::resources::{parity_cost_with, ChainModel, CostPlan, RedundancyModel, P_FUSION};

type Out = Result<String, CliError>;

/// Largest number of simultaneously present photons `statevec` allows.
pub const STATEVEC_PHOTONS: usize = 22;

pub(super) fn execute(cmd: &Command) -> Out {
    match cmd {
        Command::Analytic(a) => analytic(a),
        Command::Mc(a) => mc(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Statevec(a) => statevec(a),
        Command::Threshold(a) => threshold(a),
        Command::Cost(c) => cost(c),
    }
}

fn header(command: &str, seed: Option<u64>) -> String {
    let mut h = format!("# plqc {} build={BUILD}\n# command={command}\n", env!("CARGO_PKG_VERSION"));
    if let Some(s) = seed {
        let _ = writeln!(h, "# seed={s}");
    }
    h
}

fn efficiencies(args: &EtaArgs, eta: f64) -> Result<EfficiencyParams, CliError> {
    Ok(EfficiencyParams::new(args.eta_s.unwrap_or(eta), args.eta_m.unwrap_or(eta), args.eta_d.unwrap_or(eta))?)
}

fn eta_cols(e: &EfficiencyParams) -> String {
    format!("{},{},{},{},{}", e.eta_s, e.eta_m, e.eta_d, e.eta1(), e.eta2())
}

/// Every `(n, eta)` pair of a sweep, `n` outermost.
fn grid(ns: &[usize], args: &EtaArgs) -> Result<Vec<(usize, EfficiencyParams)>, CliError> {
    let etas = args.eta.values();
    let mut out = Vec::with_capacity(ns.len() * etas.len());
    for &n in ns {
        for &eta in &etas {
            out.push((n, efficiencies(args, eta)?));
        }
    }
    Ok(out)
}

/// Rows computed in parallel and joined in grid order.
fn rows<T: Sync>(points: &[T], f: impl Fn(&T) -> Result<String, CliError> + Sync + Send) -> Out {
    let rows: Vec<String> = points.par_iter().map(f).collect::<Result<_, _>>()?;
    Ok(rows.concat())
}

fn analytic(a: &Analytic) -> Out {
    match a {
        Analytic::Pe { n, q, optimal_q, q_max, eta } => {
            let mut out = header("analytic pe", None);
            out.push_str("n,q,eta_s,eta_m,eta_d,eta1,eta2,p_qs,p_ff,p_qf,p_e\n");
            let points = with_q(grid(&n.values(), eta)?, q.as_ref().map(|r| r.values()), *optimal_q);
            out += &rows(&points, |&(n, e, q)| {
                let q = match q {
                    Some(q) => q,
                    None => optimal_q_with(n, e.eta1(), e.eta2(), *q_max)?.q,
                };
                let p = MemoryModel::new(n, e.eta1(), e.eta2())?.point(q as f64);
                Ok(format!("{n},{q},{},{},{},{},{}\n", eta_cols(&e), p.p_qs, p.p_ff, p.p_qf, p.p_e))
            })?;
            Ok(out)
        }
        Analytic::Optq { n, q_max, eta } => {
            let mut out = header("analytic optq", None);
            out.push_str("n,eta_s,eta_m,eta_d,eta1,eta2,q_opt,p_e,q_continuous,at_boundary\n");
            out += &rows(&grid(&n.values(), eta)?, |&(n, e)| {
                let o = optimal_q_with(n, e.eta1(), e.eta2(), *q_max)?;
                Ok(format!("{n},{},{},{},{},{}\n", eta_cols(&e), o.q, o.p_e, o.q_continuous, o.warning.is_some()))
            })?;
            Ok(out)
        }
        Analytic::Ptotal { n, q, optimal_q, q_max, eta } => {
            let mut out = header("analytic ptotal", None);
            out.push_str("n,q,eta_s,eta_m,eta_d,eta1,eta2,m1,m2,m3,m4,m5,m,k,p_total,p_total_clamped\n");
            let points = with_q(grid(&n.values(), eta)?, q.as_ref().map(|r| r.values()), *optimal_q);
            out += &rows(&points, |&(n, e, q)| {
                let q = match q {
                    Some(q) => q,
                    None => optimal_q_with(n, e.eta1(), e.eta2(), *q_max)?.q,
                };
                let t = m_terms(n, q as f64, e.eta1(), e.eta2())?;
                Ok(format!(
                    "{n},{q},{},{},{},{},{},{},{},{},{},{}\n",
                    eta_cols(&e),
                    t.m1,
                    t.m2,
                    t.m3,
                    t.m4,
                    t.m5,
                    t.m,
                    t.k,
                    t.p_total,
                    t.p_total_clamped
                ))
            })?;
            Ok(out)
        }
    }
}

/// Adds the redundancy axis; `None` marks "use the optimal q".
fn with_q(points: Vec<(usize, EfficiencyParams)>, qs: Option<Vec<usize>>, optimal: bool) -> Vec<(usize, EfficiencyParams, Option<u128>)> {
    match qs {
        Some(qs) if !optimal => points
            .into_iter()
            .flat_map(|(n, e)| qs.iter().map(move |&q| (n, e, Some(q as u128))))
            .collect(),
        _ => points.into_iter().map(|(n, e)| (n, e, None)).collect(),
    }
}

fn layout(n: usize, q: usize) -> Result<CodeLayout, CliError> {
    Ok(CodeLayout::new(n, q)?)
}

/// Closed-form reference for a Monte Carlo estimate, where one exists.
fn reference(protocol: Protocol, n: usize, q: usize, e: &EfficiencyParams) -> Result<f64, CliError> {
    Ok(match protocol {
        Protocol::Memory => p_e(n, q as f64, e.eta1(), e.eta2())?,
        Protocol::Cnot => p_total(n, q as f64, e.eta1(), e.eta2())?.0,
        other => return Err(CliError::Usage(format!("--check has no closed form for `{other}`"))),
    })
}

fn mc(a: &McArgs) -> Out {
    let protocol: Protocol = a.protocol.parse()?;
    let mut points = Vec::new();
    for (n, e) in grid(&a.n.values(), &a.eta)? {
        for q in a.q.values() {
            let plan = TrialPlan::new(protocol, layout(n, q)?, a.trials, a.seed)?;
            let refv = if a.check { Some(reference(protocol, n, q, &e)?) } else { None };
            points.push((plan, e, refv));
        }
    }
    let mut out = header(&format!("mc {protocol}"), Some(a.seed));
    out.push_str("protocol,n,q,eta_s,eta_m,eta_d,eta1,eta2,trials,successes,p_hat,std_err,seed\n");
    let mut checks = String::new();
    let mut failed = 0;
    // Points run one after another; trials inside a point are parallel.
    for (plan, e, refv) in &points {
        let est = run_monte_carlo(plan, e)?;
        let (n, q) = (plan.layout.n, plan.layout.q);
        let _ = writeln!(
            out,
            "{protocol},{n},{q},{},{},{},{},{},{}",
            eta_cols(e),
            est.trials,
            est.successes,
            est.p_hat,
            est.std_err,
            plan.seed
        );
        if let Some(r) = refv {
            let pr = r.clamp(0.0, 1.0);
            let se = (pr * (1.0 - pr) / est.trials as f64).sqrt();
            let dev = (est.p_hat - r).abs();
            let pass = dev <= 4.0 * se;
            failed += (!pass) as usize;
            let _ = writeln!(
                checks,
                "# check n={n} q={q} eta1={} eta2={} p_hat={} closed_form={r} sigma={} {}",
                e.eta1(),
                e.eta2(),
                est.p_hat,
                if se > 0.0 { dev / se } else if dev == 0.0 { 0.0 } else { f64::INFINITY },
                if pass { "pass" } else { "fail" }
            );
        }
    }
    out += &checks;
    if failed > 0 {
        return Err(CliError::Check(out, format!("{failed} of {} points outside 4 sigma", points.len())));
    }
    Ok(out)
}

fn enumerate(a: &EnumerateArgs) -> Out {
    let (tree, name) = match a.protocol {
        TreeKind::Memory => (TreeProtocol::Memory, "memory"),
        TreeKind::Cnot => (TreeProtocol::Cnot, "cnot"),
    };
    let mut points = Vec::new();
    for (n, e) in grid(&a.n.values(), &a.eta)? {
        for q in a.q.values() {
            points.push((layout(n, q)?, e));
        }
    }
    let mut out = header(&format!("enumerate {name}"), None);
    out.push_str("protocol,n,q,eta_s,eta_m,eta_d,eta1,eta2,enumerated,closed_form,abs_diff,nodes\n");
    for (l, e) in points {
        let en = enumerate_event_tree(tree, l, &e)?;
        let cf = match tree {
            TreeProtocol::Memory => p_e(l.n, l.q as f64, e.eta1(), e.eta2())?,
            TreeProtocol::Cnot => p_total(l.n, l.q as f64, e.eta1(), e.eta2())?.0,
        };
        let _ = writeln!(
            out,
            "{name},{},{},{},{},{cf},{},{}",
            l.n,
            l.q,
            eta_cols(&e),
            en.success,
            (en.success - cf).abs(),
            en.nodes()
        );
    }
    Ok(out)
}

fn as_rows(u: Unitary) -> Vec<Vec<C64>> {
    u.iter().map(|r| r.to_vec()).collect()
}

fn statevec(a: &StatevecArgs) -> Out {
    let l = layout(a.n, a.q)?;
    let mut engine = Engine::new(a.seed, 0).with_capacity(STATEVEC_PHOTONS);
    let detector = if a.eta >= 1.0 {
        Detector::lossless()
    } else {
        Detector::random(EfficiencyParams::uniform(a.eta)?, a.seed, 0)
    };
    let (ref_a, mut qa) = make_choi_pair(&mut engine, l)?;
    let mut run = Run::new(engine, detector);
    let op = format!("{:?}", a.op).to_lowercase();
    let (status, qubits, u) = if a.op == StatevecOp::Cnot {
        let (ref_b, mut qb) = make_choi_pair(&mut run.engine, l)?;
        let status = cnot_logical(&mut run, &mut qa, &mut qb, l)?;
        let (o, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        let u = vec![vec![i, o, o, o], vec![o, i, o, o], vec![o, o, o, i], vec![o, o, i, o]];
        (status, vec![ref_a, ref_b, qa, qb], u)
    } else {
        let (status, u) = match a.op {
            StatevecOp::Memory => (active_memory_cycle(&mut run, &mut qa, l)?, gate::identity()),
            StatevecOp::Z90 => (z_theta_logical(&mut run, &mut qa, l, std::f64::consts::FRAC_PI_2)?, gate::z_theta(std::f64::consts::FRAC_PI_2)),
            StatevecOp::Ztheta => (z_theta_logical(&mut run, &mut qa, l, a.theta)?, gate::z_theta(a.theta)),
            _ => (x90_logical(&mut run, &mut qa, l)?, gate::x_theta(std::f64::consts::FRAC_PI_2)),
        };
        (status, vec![ref_a, qa], as_rows(u))
    };
    let mut out = header(&format!("statevec {op}"), Some(a.seed));
    let _ = writeln!(out, "# op={op} n={} q={} eta={}", a.n, a.q, a.eta);
    out += &run.record.to_lines();
    if status.is_success() {
        let refs: Vec<&LogicalQubit> = qubits.iter().collect();
        let got = logical_projection(&run.engine, &refs)?;
        let _ = writeln!(out, "process_fidelity={:.6}", fidelity(&choi_state(&u), &got));
    } else {
        out.push_str("process_fidelity=n/a\n");
    }
    Ok(out)
}

fn threshold(a: &ThresholdArgs) -> Out {
    let protocol = match a.protocol {
        TreeKind::Memory => ProtocolKind::Memory,
        TreeKind::Cnot => ProtocolKind::Cnot,
    };
    let cfg = ThresholdConfig {
        protocol,
        schedule: a.schedule.clone(),
        tolerance: a.tolerance,
        width: a.width,
        eta_s: a.eta_s,
        eta_m: a.eta_m,
        eta_d: a.eta_d,
        lo: a.lo,
        hi: a.hi,
    };
    let report = find_threshold(&cfg)?;
    Ok(format!("{}{report}\n", header(&format!("threshold {protocol}"), None)))
}

fn cost(c: &Cost) -> Out {
    let plan = match *c {
        Cost::Parity { n, p_i } => {
            let (cost, tree) = parity_cost_with(n, p_i)?;
            CostPlan {
                target: format!("|0>^({n})"),
                expected_bell_pairs: cost,
                tree: Some(tree),
                notes: vec![("join".into(), "type-I".into())],
            }
        }
        Cost::Chain { n, segment, p_ii } => ChainModel::with(n, segment, P_FUSION, p_ii)?.plan()?,
        Cost::Redundancy { n, q, p_c, step_cost } => RedundancyModel::with(n, q, P_FUSION, P_FUSION, p_c, step_cost)?.plan(),
    };
    let kind = match c {
        Cost::Parity { .. } => "parity",
        Cost::Chain { .. } => "chain",
        Cost::Redundancy { .. } => "redundancy",
    };
    Ok(format!("{}{plan}\n", header(&format!("cost {kind}"), None)))
}
