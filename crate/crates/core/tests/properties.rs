mod common;

use fbmatch::gda::run_gda;
use fbmatch::instances::{gen_random, CapacityRule, DistKind, RandomParams};
use fbmatch::model::validate_matching;
use fbmatch::oracle::{enumerate_matchings, DEFAULT_BUDGET};
use fbmatch::prob::{self, McConfig, ProsResult, Value};
use fbmatch::rational;
use fbmatch::{parse_instance, parse_matching, Instance};
use proptest::prelude::*;

fn instance(n: usize, m: usize, features: usize, dist: DistKind, seed: u64) -> Instance {
    gen_random(&RandomParams {
        n,
        m,
        capacities: CapacityRule::AllOnes,
        features,
        dist,
        seed,
    })
    .unwrap()
}

fn strategy() -> impl Strategy<Value = fbmatch::gda::Strategy> {
    prop::sample::select(fbmatch::gda::Strategy::ALL.to_vec())
}

fn count_partial_injections(n: usize, m: usize) -> u64 {
    // sum over k matched students of C(n,k) * m!/(m-k)!
    let mut total = 0u64;
    for k in 0..=n.min(m) {
        let choose: u64 = (0..k).map(|i| (n - i) as u64).product::<u64>() / (1..=k as u64).product::<u64>();
        let arrange: u64 = (0..k).map(|i| (m - i) as u64).product();
        total += choose * arrange;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gda_output_is_feasible(n in 1usize..5, m in 1usize..5, seed: u64, s in strategy()) {
        let inst = instance(n, m, 2, DistKind::UniformSimplex, seed);
        let (matching, trace) = run_gda(&inst, s, &McConfig::default()).unwrap();
        prop_assert!(validate_matching(&inst, &matching).unwrap().is_feasible());
        prop_assert_eq!(&trace.final_matching, &matching);
        // every seat is filled or every student is placed
        let placed = matching.assignment().iter().flatten().count();
        prop_assert_eq!(placed, n.min(m));
    }

    #[test]
    fn weak_probability_matches_interval_oracle(seed: u64, ci in 0usize..3, cj in 0usize..3) {
        let inst = instance(1, 3, 2, DistKind::UniformSimplex, seed);
        let mc = McConfig::default();
        let weak = prob::pr_prefers(&inst, 0, ci, cj, false, &mc).unwrap();
        let strict = prob::pr_prefers(&inst, 0, cj, ci, true, &mc).unwrap();
        let want = if ci == cj { rational::one() } else { common::weak_uniform_2f(&inst, 0, ci, cj) };
        prop_assert_eq!(weak.exact(), Some(&want));
        prop_assert_eq!(weak.exact().unwrap() + strict.exact().unwrap(), rational::one());
    }

    #[test]
    fn discrete_pros_matches_joint_enumeration(seed: u64, features in 2usize..4, s in strategy()) {
        let inst = instance(3, 3, features, DistKind::Discrete { points: 2 }, seed);
        let (m, _) = run_gda(&inst, s, &McConfig::default()).unwrap();
        let got = prob::pros_exact(&inst, &m).unwrap();
        prop_assert_eq!(got, ProsResult::Exact(common::enumerate_pros(&inst, &m)));
    }

    #[test]
    fn pros_is_a_probability(seed: u64, pick in 0usize..34) {
        let inst = instance(3, 3, 2, DistKind::UniformSimplex, seed);
        let all: Vec<_> = enumerate_matchings(&inst, DEFAULT_BUDGET).unwrap().collect();
        let m = &all[pick % all.len()];
        let p = prob::pros_exact_2f(&inst, m).unwrap();
        let r = p.exact().unwrap();
        prop_assert!(*r >= rational::zero() && *r <= rational::one());
    }

    #[test]
    fn monte_carlo_is_reproducible(seed: u64, mc_seed: u64) {
        let inst = instance(3, 3, 3, DistKind::UniformSimplex, seed);
        let (m, _) = run_gda(&inst, fbmatch::gda::Strategy::Heuf, &McConfig { samples: 2_000, seed: mc_seed }).unwrap();
        let a = prob::pros_monte_carlo(&inst, &m, 2_000, mc_seed).unwrap();
        let b = prob::pros_monte_carlo(&inst, &m, 2_000, mc_seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn enumeration_count_matches_closed_form(n in 1usize..5, m in 1usize..5, seed: u64) {
        let inst = instance(n, m, 2, DistKind::UniformSimplex, seed);
        let count = enumerate_matchings(&inst, DEFAULT_BUDGET).unwrap().count() as u64;
        prop_assert_eq!(count, count_partial_injections(n, m));
    }

    #[test]
    fn instance_json_round_trips(seed: u64, features in 2usize..4) {
        let inst = instance(3, 2, features, DistKind::Discrete { points: 2 }, seed);
        let back = parse_instance(&inst.to_json_string()).unwrap();
        prop_assert_eq!(&back, &inst);
        let (m, _) = run_gda(&inst, fbmatch::gda::Strategy::Locv, &McConfig::default()).unwrap();
        let text = serde_json::to_string(&m.to_json(&inst)).unwrap();
        prop_assert_eq!(parse_matching(&inst, &text).unwrap(), m);
    }

    #[test]
    fn expected_utility_is_the_midpoint_under_uniform_weights(seed: u64, c in 0usize..3) {
        let inst = instance(1, 3, 2, DistKind::UniformSimplex, seed);
        let want = (inst.utility(0, 0, c) + inst.utility(0, 1, c)) * rational::half();
        prop_assert_eq!(prob::expected_utility(&inst, 0, c), Value::Exact(want));
    }
}
