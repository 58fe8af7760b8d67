//! Invariants checked on random inputs.

use plqc::analytics::{p_e, p_total, MemoryModel};
use plqc::cli::{IntRange, RealRange};
use plqc::codes::{logical_projection, make_redundant, CodeLayout, LogicalQubitSpec};
use plqc::lossmodel::{enumerate_event_tree, run_monte_carlo, EfficiencyParams, Protocol, TreeProtocol, TrialPlan};
use plqc::qstate::{fidelity, Engine};
use plqc::resources::{parity_cost_with, RedundancyModel};
use proptest::prelude::*;

fn eta() -> impl Strategy<Value = f64> {
    0.5f64..=1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn memory_outcomes_partition(n in 2usize..200, q in 1.0f64..1e6, e in eta()) {
        let p = MemoryModel::new(n, e * e * e, e * e).unwrap().point(q);
        for v in [p.p_qs, p.p_ff, p.p_qf, p.p_e] {
            prop_assert!((0.0..=1.0).contains(&v), "{v}");
        }
        prop_assert!((p.p_qs + p.p_ff + p.p_qf - 1.0).abs() < 1e-9);
    }

    #[test]
    fn memory_success_grows_with_efficiency(n in 2usize..40, q in 1usize..100, e in 0.5f64..0.99, d in 1e-4f64..0.01) {
        let at = |x: f64| p_e(n, q as f64, x * x * x, x * x).unwrap();
        prop_assert!(at((e + d).min(1.0)) >= at(e) - 1e-12);
    }

    #[test]
    fn event_trees_are_normalized(n in 2usize..=5, q in 1usize..=3, e1 in eta(), e2 in eta()) {
        let eff = EfficiencyParams::new(e2, e1 / e2.max(e1), 1.0).unwrap();
        let layout = CodeLayout::new(n, q).unwrap();
        for tree in [TreeProtocol::Memory, TreeProtocol::Cnot] {
            let en = enumerate_event_tree(tree, layout, &eff).unwrap();
            prop_assert!(en.normalization_error() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&en.success));
        }
    }

    #[test]
    fn clamped_cnot_value_is_a_probability(n in 2usize..64, q in 1.0f64..50.0, e in eta()) {
        let (raw, clamped) = p_total(n, q, e * e * e, e * e).unwrap();
        prop_assert!((0.0..=1.0).contains(&clamped));
        prop_assert!(raw >= 0.0);
        prop_assert_eq!(clamped, raw.min(1.0));
    }

    #[test]
    fn parity_cost_rises_with_size_and_falls_with_odds(n in 2usize..40, p in 0.2f64..0.95) {
        let c = |n, p| parity_cost_with(n, p).unwrap().0;
        prop_assert!(c(n + 1, p) >= c(n, p));
        prop_assert!(c(n, (p + 0.04).min(1.0)) <= c(n, p));
    }

    #[test]
    fn redundancy_cost_rises_with_blocks(n in 1usize..6, q in 2usize..6) {
        let c = |q| RedundancyModel::new(n, q).unwrap().expected_cost();
        prop_assert!(c(q + 1) > c(q));
    }

    #[test]
    fn code_states_project_back(theta in 0.0f64..std::f64::consts::PI, phi in -3.2f64..3.2, n in 1usize..=4, q in 1usize..=3) {
        let spec = LogicalQubitSpec::bloch(theta, phi);
        let mut engine = Engine::new(0, 0);
        let qubit = make_redundant(&mut engine, &spec, CodeLayout::new(n, q).unwrap()).unwrap();
        let got = logical_projection(&engine, &[&qubit]).unwrap();
        prop_assert!(fidelity(&spec.amplitudes(), &got) > 1.0 - 1e-12);
    }

    #[test]
    fn int_ranges_round_trip(min in 0usize..1000, len in 0usize..50, step in 1usize..7) {
        let max = min + len;
        let r: IntRange = format!("{min}:{max}:{step}").parse().unwrap();
        let v = r.values();
        prop_assert_eq!(v.len(), len / step + 1);
        prop_assert!(v.iter().all(|&x| (min..=max).contains(&x) && (x - min) % step == 0));
    }

    #[test]
    fn real_ranges_stay_inside(min in 0.0f64..1.0, len in 0.0f64..0.5, step in 0.001f64..0.1) {
        let r: RealRange = format!("{min}:{}:{step}", min + len).parse().unwrap();
        let v = r.values();
        prop_assert!(!v.is_empty());
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(v.iter().all(|&x| x >= min - 1e-9 && x <= min + len + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn taxonomy_partitions_trials(seed in any::<u64>(), e in 0.85f64..=1.0, which in 0usize..3) {
        let protocol = [Protocol::Memory, Protocol::X90, Protocol::ZTheta(0.3)][which];
        let plan = TrialPlan::new(protocol, CodeLayout::new(2, 2).unwrap(), 60, seed).unwrap();
        let est = run_monte_carlo(&plan, &EfficiencyParams::uniform(e).unwrap()).unwrap();
        prop_assert_eq!(est.taxonomy.total(), 60);
        prop_assert_eq!(est.successes, 60 - est.taxonomy.failure);
    }
}
