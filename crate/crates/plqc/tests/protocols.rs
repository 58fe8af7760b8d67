//! Protocols composed with each other and with the loss model.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use plqc::codes::{choi_state, logical_projection, make_choi_pair, make_redundant, CodeLayout, LogicalQubit, LogicalQubitSpec};
use plqc::lossmodel::{enumerate_event_tree, run_monte_carlo, run_trial, Detector, EfficiencyParams, Protocol, TreeProtocol, TrialPlan};
use plqc::protocols::{active_memory_cycle, cnot_logical, x90_logical, z_theta_logical, Run, TerminalStatus};
use plqc::qstate::{fidelity, gate, Engine, FusionChoice, Script, Unitary};

fn always_succeed(sign: i8) -> Script {
    Script::fusions(std::iter::repeat_n(FusionChoice::Sign(sign), 1024))
}

fn mul(a: Unitary, b: Unitary) -> Vec<Vec<C64>> {
    (0..2)
        .map(|i| (0..2).map(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]).collect())
        .collect()
}

fn rows(u: Unitary) -> Vec<Vec<C64>> {
    u.iter().map(|r| r.to_vec()).collect()
}

type Step = fn(&mut Run, &mut LogicalQubit, CodeLayout) -> plqc::Result<TerminalStatus>;

/// Applies `steps` in order to one half of a Choi pair; returns the process
/// fidelity against `want`.
fn sequence(layout: CodeLayout, steps: &[Step], want: Vec<Vec<C64>>, sign: i8) -> f64 {
    let mut engine = Engine::new(1, 0);
    let (r, mut q) = make_choi_pair(&mut engine, layout).unwrap();
    let mut run = Run::new(engine, Detector::lossless());
    run.engine.set_script(always_succeed(sign));
    for step in steps {
        assert!(step(&mut run, &mut q, layout).unwrap().is_success());
    }
    fidelity(&choi_state(&want), &logical_projection(&run.engine, &[&r, &q]).unwrap())
}

fn x90(run: &mut Run, q: &mut LogicalQubit, l: CodeLayout) -> plqc::Result<TerminalStatus> {
    x90_logical(run, q, l)
}

fn z90(run: &mut Run, q: &mut LogicalQubit, l: CodeLayout) -> plqc::Result<TerminalStatus> {
    z_theta_logical(run, q, l, FRAC_PI_2)
}

fn memory(run: &mut Run, q: &mut LogicalQubit, l: CodeLayout) -> plqc::Result<TerminalStatus> {
    active_memory_cycle(run, q, l)
}

#[test]
fn gate_sequences_compose() {
    let x = gate::x_theta(FRAC_PI_2);
    let z = gate::z_theta(FRAC_PI_2);
    for (n, qn) in [(2, 2), (3, 2), (2, 3)] {
        let l = CodeLayout::new(n, qn).unwrap();
        for sign in [1, -1] {
            assert!(sequence(l, &[x90, x90], mul(x, x), sign) > 1.0 - 1e-10);
            assert!(sequence(l, &[z90, x90], mul(x, z), sign) > 1.0 - 1e-10);
            assert!(sequence(l, &[x90, memory, z90, memory], mul(z, x), sign) > 1.0 - 1e-10);
            assert!(sequence(l, &[z90, z90, z90, z90], rows(gate::identity()), sign) > 1.0 - 1e-10);
        }
    }
}

#[test]
fn hadamard_like_sequence_maps_zero_to_plus() {
    // Z90 X90 Z90 is a Hadamard up to phase
    let l = CodeLayout::new(2, 2).unwrap();
    let mut run = Run::new(Engine::new(4, 0), Detector::lossless());
    let mut q = make_redundant(&mut run.engine, &LogicalQubitSpec::zero(), l).unwrap();
    run.engine.set_script(always_succeed(1));
    for step in [z90 as Step, x90, z90] {
        assert!(step(&mut run, &mut q, l).unwrap().is_success());
    }
    let got = logical_projection(&run.engine, &[&q]).unwrap();
    assert!(fidelity(&LogicalQubitSpec::plus().amplitudes(), &got) > 1.0 - 1e-10);
}

#[test]
fn cnot_twice_is_identity() {
    let l = CodeLayout::new(2, 2).unwrap();
    let a = LogicalQubitSpec::bloch(0.9, 0.4);
    let b = LogicalQubitSpec::bloch(2.1, -0.3);
    let mut run = Run::new(Engine::new(2, 0), Detector::lossless());
    let mut c = make_redundant(&mut run.engine, &a, l).unwrap();
    let mut t = make_redundant(&mut run.engine, &b, l).unwrap();
    run.engine.set_script(always_succeed(-1));
    for _ in 0..2 {
        assert!(cnot_logical(&mut run, &mut c, &mut t, l).unwrap().is_success());
    }
    let (x, y) = (a.amplitudes(), b.amplitudes());
    let want = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]];
    assert!(fidelity(&want, &logical_projection(&run.engine, &[&c, &t]).unwrap()) > 1.0 - 1e-10);
}

#[test]
fn memory_keeps_a_state_through_lossy_cycles() {
    let l = CodeLayout::new(3, 3).unwrap();
    let eff = EfficiencyParams::uniform(0.97).unwrap();
    let spec = LogicalQubitSpec::bloch(1.2, 2.5);
    let mut survived = 0;
    for seed in 0..30 {
        let mut run = Run::new(Engine::new(seed, 0), Detector::random(eff, seed, 0));
        let mut q = make_redundant(&mut run.engine, &spec, l).unwrap();
        let ok = (0..4).all(|_| active_memory_cycle(&mut run, &mut q, l).unwrap().is_success());
        if ok {
            survived += 1;
            let got = logical_projection(&run.engine, &[&q]).unwrap();
            assert!(fidelity(&spec.amplitudes(), &got) > 1.0 - 1e-10, "seed {seed}");
        }
    }
    assert!(survived > 0);
}

#[test]
fn monte_carlo_does_not_depend_on_thread_count() {
    let eff = EfficiencyParams::uniform(0.93).unwrap();
    let plan = TrialPlan::new(Protocol::X90, CodeLayout::new(2, 2).unwrap(), 400, 21).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_monte_carlo(&plan, &eff).unwrap());
    let b = four.install(|| run_monte_carlo(&plan, &eff).unwrap());
    assert_eq!(a, b);
}

#[test]
fn larger_memory_code_matches_enumeration() {
    let eff = EfficiencyParams::new(0.95, 0.9, 0.97).unwrap();
    let layout = CodeLayout::new(4, 2).unwrap();
    let exact = enumerate_event_tree(TreeProtocol::Memory, layout, &eff).unwrap().success;
    let trials = 10_000;
    let est = run_monte_carlo(&TrialPlan::new(Protocol::Memory, layout, trials, 8).unwrap(), &eff).unwrap();
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((est.p_hat - exact).abs() < 4.0 * se, "{} vs {exact}", est.p_hat);
}

#[test]
fn lossless_runs_detect_no_loss() {
    // fusion failures alone can still use up a block and force a recovery
    let plan = TrialPlan::new(Protocol::Cnot, CodeLayout::new(2, 2).unwrap(), 300, 4).unwrap();
    let eff = EfficiencyParams::perfect();
    for i in 0..plan.trials as u64 {
        let (_, run) = run_trial(&plan, &eff, i).unwrap();
        assert_eq!(run.record.losses_detected, 0);
    }
    let est = run_monte_carlo(&plan, &eff).unwrap();
    assert_eq!(est.taxonomy.total(), 300);
    assert!(est.taxonomy.failure > 0 && est.successes > 0);
}
