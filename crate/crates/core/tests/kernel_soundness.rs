//! Every reduction rule, applied where it fires, preserves the answer of the
//! brute-force oracle on the separate-budget instance.

use std::collections::BTreeMap;

use mlce::generate::{generate_planted, generate_uniform, PlantedParams};
use mlce::kernelize::{
    apply_rule, to_separate_budgets, ReductionRule, RuleOutcome, SeparateBudgetInstance,
};
use mlce::oracle::oracle_with_budgets;
use mlce::{Instance, LayerGraph, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PER_RULE: usize = 200;
const MAX_TRIALS: usize = 40_000;

fn decide(sb: &SeparateBudgetInstance) -> bool {
    let plain = Instance::new(sb.mode, sb.layers.clone(), 0, sb.d).unwrap();
    oracle_with_budgets(&plain, &sb.budgets).unwrap().is_some()
}

fn random_instance(rng: &mut ChaCha8Rng, mode: Mode) -> Instance {
    let k = rng.random_range(0..=2);
    let d = rng.random_range(0..=2);
    let ell = rng.random_range(1..=3);
    if rng.random_bool(0.2) {
        return disjoint_paths(rng, mode);
    }
    if rng.random_bool(0.1) {
        return shifted_matchings(rng, mode);
    }
    if rng.random_bool(0.5) {
        let n = rng.random_range(2..=7);
        generate_uniform(n, ell, rng.random_range(0.2..0.9), k, d, mode, rng.random())
    } else {
        let n = rng.random_range(3..=9);
        let p = PlantedParams {
            n,
            ell,
            clusters: rng.random_range(1..=3),
            drift: rng.random_range(0..=1),
            noise: rng.random_range(0..=2),
            seed: rng.random(),
        };
        generate_planted(&p, mode).instance.with_budgets(k, d)
    }
}

/// Several disjoint 3-vertex paths per layer: no pair is heavy, yet the
/// dirty set outgrows the budget.
fn disjoint_paths(rng: &mut ChaCha8Rng, mode: Mode) -> Instance {
    let k = rng.random_range(1..=2);
    let paths = rng.random_range(k..=k + 1);
    let n = 3 * paths + rng.random_range(0..=1);
    let ell = rng.random_range(1..=2);
    let layers = (0..ell)
        .map(|_| {
            let mut order: Vec<u32> = (1..=n as u32).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            let edges: Vec<(u32, u32)> = order
                .chunks_exact(3)
                .flat_map(|c| {
                    [
                        (c[0].min(c[1]), c[0].max(c[1])),
                        (c[1].min(c[2]), c[1].max(c[2])),
                    ]
                })
                .collect();
            LayerGraph::from_pairs(n, &edges)
        })
        .collect();
    Instance::new(mode, layers, k, rng.random_range(0..=1)).unwrap()
}

/// Perfect matchings shifted by one between layers: clean, but no component
/// is shared, so only the vertex count rule can decide.
fn shifted_matchings(rng: &mut ChaCha8Rng, mode: Mode) -> Instance {
    let n: u32 = rng.random_range(4..=10);
    let ell = rng.random_range(2..=3);
    let layers = (0..ell)
        .map(|i| {
            let edges: Vec<(u32, u32)> = (1 + i % 2..n).step_by(2).map(|a| (a, a + 1)).collect();
            LayerGraph::from_pairs(n as usize, &edges)
        })
        .collect();
    Instance::new(mode, layers, 0, rng.random_range(0..=1)).unwrap()
}

fn rules_preserve_answers(mode: Mode, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fired: BTreeMap<ReductionRule, usize> = BTreeMap::new();
    let mut trials = 0;
    while trials < MAX_TRIALS
        && ReductionRule::ALL
            .iter()
            .any(|r| fired.get(r).copied().unwrap_or(0) < PER_RULE)
    {
        trials += 1;
        let inst = random_instance(&mut rng, mode);
        let mut cur = to_separate_budgets(&inst);
        let mut answer = decide(&cur);
        'scan: loop {
            for rule in ReductionRule::ALL {
                match apply_rule(&cur, rule).unwrap() {
                    RuleOutcome::NotApplicable => continue,
                    RuleOutcome::TrivialNo => {
                        *fired.entry(rule).or_default() += 1;
                        assert!(
                            !answer,
                            "{rule} rejected a yes-instance (mode {mode}, trial {trials})\n{cur:?}"
                        );
                        break 'scan;
                    }
                    RuleOutcome::Applied(next, rec) => {
                        *fired.entry(rule).or_default() += 1;
                        let after = decide(&next);
                        assert_eq!(
                            answer, after,
                            "{rec} changed the answer (mode {mode})\n{cur:?}"
                        );
                        cur = next;
                        answer = after;
                        continue 'scan;
                    }
                }
            }
            break;
        }
    }
    let summary: Vec<String> = ReductionRule::ALL
        .iter()
        .map(|r| format!("{r}={}", fired.get(r).copied().unwrap_or(0)))
        .collect();
    println!(
        "mode {mode}: {trials} instances, fired {}",
        summary.join(" ")
    );
    for r in ReductionRule::ALL {
        assert!(
            fired.get(&r).copied().unwrap_or(0) >= PER_RULE,
            "{r} fired too rarely in mode {mode}: {}",
            summary.join(" ")
        );
    }
}

#[test]
fn mlce_rules_preserve_answers() {
    rules_preserve_answers(Mode::Mlce, 11);
}

#[test]
fn tce_rules_preserve_answers() {
    rules_preserve_answers(Mode::Tce, 12);
}
