//! Property-based invariants across the solvers, mostly differential:
//! closed forms against brute force, recursions against enumeration.

mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rescue_games::best_response::{Direction, ResponseProblem};
use rescue_games::files::{parse_str, to_canonical_json, ParsedInstance};
use rescue_games::oracle::{build_matrix_tree, solve_matrix};
use rescue_games::rational::{parse_rational, rat, Rational};
use rescue_games::tree::{
    enumerate_depth_first_searches, expanding_search_payoff, pi, searcher_guarantee, solve_tree,
};
use rescue_games::{
    Caps, HiderMix, HiderSet, Instance, SearchOrder, SearcherMix, SetFunctionGame, SetFunctionSpec,
};
use std::collections::BTreeSet;

fn prob() -> impl Strategy<Value = Rational> {
    (2..=20i64).prop_flat_map(|den| (1..den).prop_map(move |num| rat(num, den)))
}

fn probs(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(prob(), n)
}

fn instance(p: &[Rational], k: usize) -> Instance {
    Instance::new(
        p.iter()
            .enumerate()
            .map(|(i, p)| ((i + 1).to_string(), p.clone())),
        k,
    )
}

fn all_orders(ids: &[String]) -> Vec<SearchOrder> {
    fn walk(pool: &mut Vec<String>, current: &mut Vec<String>, out: &mut Vec<SearchOrder>) {
        if pool.is_empty() {
            out.push(SearchOrder::new(current.clone()));
            return;
        }
        for i in 0..pool.len() {
            let id = pool.remove(i);
            current.push(id.clone());
            walk(pool, current, out);
            current.pop();
            pool.insert(i, id);
        }
    }
    let mut out = Vec::new();
    walk(&mut ids.to_vec(), &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn survival_is_multiplicative_over_disjoint_sets(
        p in probs(2..=8),
        split in prop::collection::vec(0u8..3, 8),
    ) {
        let inst = instance(&p, 1);
        let mut left = BTreeSet::new();
        let mut right = BTreeSet::new();
        for (i, class) in split.iter().take(p.len()).enumerate() {
            match class {
                0 => { left.insert((i + 1).to_string()); }
                1 => { right.insert((i + 1).to_string()); }
                _ => {}
            }
        }
        let union: BTreeSet<String> = left.union(&right).cloned().collect();
        prop_assert_eq!(
            inst.survival(&union).unwrap(),
            inst.survival(&left).unwrap() * inst.survival(&right).unwrap()
        );
    }

    #[test]
    fn moving_a_target_location_earlier_never_hurts(
        p in probs(3..=6),
        k in 1usize..3,
        seed in any::<u64>(),
    ) {
        let n = p.len();
        let k = k.min(n - 1);
        let inst = instance(&p, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ids: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        // Fisher-Yates with the seeded generator.
        for i in (1..ids.len()).rev() {
            let j = rand::Rng::random_range(&mut rng, 0..=i);
            ids.swap(i, j);
        }
        let hider = HiderSet::new(ids.iter().rev().take(k).cloned());
        for t in 0..n - 1 {
            if !hider.contains(&ids[t]) && hider.contains(&ids[t + 1]) {
                let before = inst
                    .payoff(&hider, &SearchOrder::new(ids.clone()))
                    .unwrap();
                let mut promoted = ids.clone();
                promoted.swap(t, t + 1);
                let after = inst
                    .payoff(&hider, &SearchOrder::new(promoted))
                    .unwrap();
                prop_assert!(after >= before);
            }
        }
    }

    #[test]
    fn first_block_payoffs_are_symmetric(
        p in probs(2..=6),
        k in 1usize..3,
        seed in any::<u64>(),
    ) {
        let n = p.len();
        let k = k.min(n - 1);
        let inst = instance(&p, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |rng: &mut ChaCha8Rng| {
            let mut ids: Vec<usize> = (1..=n).collect();
            for i in (1..ids.len()).rev() {
                let j = rand::Rng::random_range(rng, 0..=i);
                ids.swap(i, j);
            }
            HiderSet::new(ids.into_iter().take(k).map(|i| i.to_string()))
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let forward = inst
            .expected_payoff(&HiderMix::point(a.clone()), &SearcherMix::first_block(b.clone()))
            .unwrap();
        let backward = inst
            .expected_payoff(&HiderMix::point(b), &SearcherMix::first_block(a))
            .unwrap();
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn closed_form_equalizes_every_order(seed in any::<u64>(), n in 2usize..=5, which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = rand_family(&mut rng, n, which);
        let k = 1 + (seed as usize) % (n - 1);
        let solution = game.solve_closed_form(k).unwrap();
        for order in all_orders(game.ids()) {
            let payoff = game
                .expected_payoff(&solution.hider, &SearcherMix::point(order))
                .unwrap();
            prop_assert_eq!(payoff, solution.value.clone());
        }
    }

    #[test]
    fn cost_scaling_changes_nothing(seed in any::<u64>(), n in 2usize..=6, scale in 1i64..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<Rational> = (0..n).map(|_| rand_cost(&mut rng)).collect();
        let scaled: Vec<Rational> = c.iter().map(|v| v * rat(scale, 1)).collect();
        let base = SetFunctionGame::new(location_ids(n), SetFunctionSpec::AdditiveCost { c }).unwrap();
        let stretched =
            SetFunctionGame::new(location_ids(n), SetFunctionSpec::AdditiveCost { c: scaled }).unwrap();
        // Same recovered index, hence the same optimal strategies.
        let base_z = base.recover_z().unwrap();
        let stretched_z = stretched.recover_z().unwrap();
        prop_assert_eq!(base_z.values(), stretched_z.values());
        let k = 1 + (seed as usize) % (n - 1);
        prop_assert_eq!(
            base.solve_closed_form(k).unwrap().hider,
            stretched.solve_closed_form(k).unwrap().hider
        );
    }

    #[test]
    fn value_formula_matches_the_equalized_value(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = rand_rescue(&mut rng, n);
        prop_assert_eq!(game.value_k1().unwrap(), game.solve_closed_form(1).unwrap().value);
    }

    #[test]
    fn index_rule_is_a_best_response(seed in any::<u64>(), n in 2usize..=6, which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = rand_family(&mut rng, n, which);
        let x = loop {
            let nums: Vec<i64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0..=5)).collect();
            let total: i64 = nums.iter().sum();
            if total > 0 {
                break nums.into_iter().map(|v| rat(v, total)).collect::<Vec<_>>();
            }
        };
        let problem = ResponseProblem::new(game, x).unwrap();
        for direction in [Direction::Maximize, Direction::Minimize] {
            let order = problem.index_order(direction).unwrap();
            let (_, best) = problem.best_response_bruteforce(direction, 9).unwrap();
            prop_assert_eq!(problem.response_payoff(&order).unwrap(), best);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tree_solutions_satisfy_their_invariants(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = rand_tree(&mut rng, n, 20);
        let solution = solve_tree(&tree).unwrap();

        // Value bounds.
        let all: BTreeSet<String> = tree.vertices().iter().map(|(id, _)| id.clone()).collect();
        let survival = pi(&tree, &all).unwrap();
        prop_assert!(solution.value >= survival);
        prop_assert!(solution.value <= rat(1, 1));

        // The hider distribution sits on the leaves and sums to 1.
        let leaves: BTreeSet<String> = tree.leaves().unwrap().into_iter().collect();
        let total: Rational = solution.hider.values().sum();
        prop_assert_eq!(total, rat(1, 1));
        for leaf in solution.hider.keys() {
            prop_assert!(leaves.contains(leaf));
        }

        // Branch probabilities live in [0,1].
        for q in solution.branch_choice.values() {
            prop_assert!(*q >= rat(0, 1) && *q <= rat(1, 1));
        }

        // Depth-first searches of the original tree all earn the value,
        // and the sampled strategy guarantees it at every leaf.
        for search in enumerate_depth_first_searches(&tree, 100_000).unwrap() {
            let payoff = expanding_search_payoff(&tree, &solution.hider, &search).unwrap();
            prop_assert_eq!(payoff, solution.value.clone());
        }
        for leaf in &leaves {
            prop_assert_eq!(searcher_guarantee(&solution, leaf).unwrap(), solution.value.clone());
        }
    }

    #[test]
    fn wide_trees_keep_their_value_after_normalization(seed in any::<u64>(), n in 5usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = rand_tree_with_wide_vertex(&mut rng, n);
        let solution = solve_tree(&tree).unwrap();
        let matrix = build_matrix_tree(&tree, false, &Caps::default()).unwrap();
        prop_assert_eq!(solve_matrix(&matrix).unwrap().value, solution.value);
    }

    #[test]
    fn canonical_files_round_trip(seed in any::<u64>(), n in 2usize..=6, kind in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parsed = if kind == 5 {
            ParsedInstance::Tree(rand_tree(&mut rng, n, 10))
        } else if kind == 4 {
            // Exercise the table kind with an indexable table.
            let game = rand_rescue(&mut rng, n.min(4));
            let values: Vec<Rational> = (0..(1u64 << game.n()))
                .map(|mask| {
                    let members: BTreeSet<String> = (0..game.n())
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| game.ids()[i].clone())
                        .collect();
                    game.eval(&members).unwrap()
                })
                .collect();
            let table = SetFunctionGame::new(
                game.ids().to_vec(),
                SetFunctionSpec::ExplicitTable { values },
            )
            .unwrap();
            ParsedInstance::Unstructured { game: table, k: 1 }
        } else {
            ParsedInstance::Unstructured {
                game: rand_family(&mut rng, n, kind),
                k: 1 + (seed as usize) % (n - 1),
            }
        };
        let json = to_canonical_json(&parsed);
        prop_assert_eq!(parse_str(&json).unwrap(), parsed);
    }

    #[test]
    fn rational_strings_round_trip(num in any::<i64>(), den in 1u32..=1_000_000) {
        let value = Rational::new(num.into(), (den as i64).into());
        prop_assert_eq!(parse_rational(&value.to_string()).unwrap(), value);
    }
}
