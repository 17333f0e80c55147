//! Structural properties of the pairing objective and the tree search.

mod common;

use airfusion_core::optimal::SearchTree;
use airfusion_core::oracle::brute_force_permutations;
use airfusion_core::{
    dfs_optimal_with, greedy_pairing, homogeneous_partition, objective, optimal_pairing_with, optimal_receive_snr,
    Allocation, Pairing, SolverOptions,
};
use common::draw;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pairing(v: usize, m: usize, rng: &mut ChaCha8Rng) -> Pairing {
    let mut subs: Vec<usize> = (0..m).collect();
    subs.shuffle(rng);
    subs.truncate(v);
    Pairing::new(subs, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Swapping the subcarriers of two voxels with the same sparsity column
    /// leaves every agent cost unchanged to the bit.
    #[test]
    fn homogeneous_swaps_preserve_costs(k in 2usize..=5, v in 2usize..=20, extra in 0usize..4, seed: u64) {
        let m = v + extra;
        let d = draw(k, v, m, 1.0 / 3.0, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairing = random_pairing(v, m, &mut rng);
        let before = objective(&pairing, &d.pattern, &d.costs).unwrap();
        for group in homogeneous_partition(&d.pattern).groups().iter().filter(|g| g.len() >= 2) {
            let a = group.voxels[rng.random_range(0..group.len())];
            let b = group.voxels[rng.random_range(0..group.len())];
            let after = objective(&pairing.swapped(a, b), &d.pattern, &d.costs).unwrap();
            prop_assert_eq!(before.value.to_bits(), after.value.to_bits());
            for (x, y) in before.per_agent.iter().zip(&after.per_agent) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    /// Pruning, agent ordering and warm starts change the work, never the optimum.
    #[test]
    fn search_variants_agree(k in 2usize..=4, n in 3usize..=7, seed: u64) {
        let d = draw(k, n, n, 1.0 / 3.0, seed);
        let reference = dfs_optimal_with(&d.pattern, &d.costs, SolverOptions { pruning: false, ..Default::default() }).unwrap();
        for (pruning, agent_ordering, warm_start) in [(true, true, false), (true, false, false), (true, true, true), (false, false, false)] {
            let options = SolverOptions { pruning, agent_ordering, warm_start, max_iterations: None };
            let sol = dfs_optimal_with(&d.pattern, &d.costs, options).unwrap();
            prop_assert_eq!(sol.objective, reference.objective);
            prop_assert!(sol.stats.complete);
        }
        prop_assert_eq!(reference.stats.leaves.to_string(), reference.stats.compact_space_size.to_string());
    }

    /// Every local objective on the path to the optimum is a lower bound on it,
    /// and the largest one is the optimum.
    #[test]
    fn path_objectives_bound_the_optimum(k in 2usize..=5, n in 4usize..=14, seed: u64) {
        let d = draw(k, n, n, 1.0 / 3.0, seed);
        let sol = dfs_optimal_with(&d.pattern, &d.costs, SolverOptions::default()).unwrap();
        prop_assert_eq!(sol.path_objectives.len(), k);
        let top = sol.path_objectives.iter().copied().fold(0.0, f64::max);
        let tol = 1e-12 * sol.objective;
        prop_assert!(sol.path_objectives.iter().all(|&f| f <= sol.objective + tol));
        prop_assert!((top - sol.objective).abs() <= tol);
    }

    /// Children are produced in ascending local objective, and the search's
    /// optimum lower-bounds every leaf of the full tree.
    #[test]
    fn children_ascend_and_optimum_beats_every_leaf(k in 2usize..=3, n in 3usize..=6, seed: u64) {
        let d = draw(k, n, n, 0.5, seed);
        let order: Vec<usize> = (0..k).collect();
        let tree = SearchTree::new(&d.pattern, &d.costs, &order).unwrap();
        let best = dfs_optimal_with(&d.pattern, &d.costs, SolverOptions::default()).unwrap().objective;
        let mut stack = vec![tree.root()];
        while let Some(node) = stack.pop() {
            let mut children = tree.children(&node);
            let mut last = f64::NEG_INFINITY;
            while let Some(child) = tree.next_child(&mut children) {
                prop_assert!(child.local_objective() >= last);
                last = child.local_objective();
                if child.depth() == k {
                    let f = objective(&tree.realize(&child), &d.pattern, &d.costs).unwrap().value;
                    prop_assert!(best <= f);
                } else {
                    stack.push(child);
                }
            }
        }
    }
}

/// An exhausted iteration budget still returns a valid pairing no better than the optimum.
#[test]
fn budgeted_search_returns_a_valid_pairing() {
    for seed in 0..20 {
        let d = draw(4, 20, 24, 1.0 / 3.0, seed);
        let exact = optimal_pairing_with(&d.pattern, &d.costs, SolverOptions::default()).unwrap();
        let options = SolverOptions {
            max_iterations: Some(5),
            ..Default::default()
        };
        let capped = optimal_pairing_with(&d.pattern, &d.costs, options).unwrap();
        let f = objective(&capped.pairing, &d.pattern, &d.costs).unwrap().value;
        assert_eq!(f, capped.objective);
        assert!(f >= exact.objective);
        assert!(exact.stats.complete);
    }
}

/// The greedy pairing is never better than the optimum.
#[test]
fn greedy_never_beats_optimal() {
    for seed in 0..200 {
        let d = draw(3, 6, 7, 1.0 / 3.0, seed);
        let opt = optimal_pairing_with(&d.pattern, &d.costs, SolverOptions::default()).unwrap();
        let greedy = objective(&greedy_pairing(&d.pattern, &d.costs).unwrap(), &d.pattern, &d.costs).unwrap();
        assert!(greedy.value >= opt.objective);
    }
}

/// The common receive SNR exhausts the bottleneck agent's budget and no other.
#[test]
fn equal_snr_power_fits_every_budget() {
    let p_max = 0.01;
    for seed in 0..50 {
        let d = draw(4, 16, 16, 1.0 / 3.0, seed);
        let sol = dfs_optimal_with(&d.pattern, &d.costs, SolverOptions::default()).unwrap();
        let alloc = Allocation::with_optimal_power(
            sol.pairing.clone(),
            d.pattern.clone(),
            &d.channels,
            p_max,
            d.costs.noise_power(),
        )
        .unwrap();
        assert_eq!(alloc.receive_snr, optimal_receive_snr(sol.objective, p_max));
        let per_agent = objective(&sol.pairing, &d.pattern, &d.costs).unwrap().per_agent;
        let bottleneck = (0..4).max_by(|&a, &b| per_agent[a].total_cmp(&per_agent[b])).unwrap();
        for a in 0..4 {
            assert!(alloc.agent_power(a) <= p_max * (1.0 + 1e-9));
        }
        assert!((alloc.agent_power(bottleneck) - p_max).abs() <= 1e-9 * p_max);
    }
}

/// The optimum over pairings matches the oracle on square instances with many ties in `S`.
#[test]
fn dense_patterns_match_oracle() {
    for seed in 0..30 {
        let d = draw(3, 6, 6, 0.8, seed);
        let sol = dfs_optimal_with(&d.pattern, &d.costs, SolverOptions::default()).unwrap();
        assert_eq!(
            sol.objective,
            brute_force_permutations(&d.pattern, &d.costs).unwrap().best_objective
        );
    }
}
