//! Exact pairing by depth-first branch and bound over the compact search tree.
//!
//! Voxels with identical sparsity columns are interchangeable, so the search
//! runs over subset-to-subset mappings rather than permutations. Depth `d`
//! fixes the subcarrier set of the `d`-th agent; children are visited in
//! ascending cost for that agent. Every local cost lower-bounds the global
//! objective, which gives two cut rules:
//!
//! * stop: once the open depth-1 node costs at least the best full solution,
//!   that solution is optimal;
//! * prune: once the open child of a node costs at least the best
//!   sub-tree objective (max over the deeper agents) found below that node,
//!   the rest of that node's sub-tree cannot improve on it.
//!
//! Agents are branched in descending order of their unconstrained best cost.

mod kbest;
mod tree;

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::greedy::greedy_pairing;
use crate::model::{augment_dummy_voxels, cost_matrix, ChannelMatrix, CostMatrix, SparsityPattern};
use crate::pairing::{objective, Pairing};
use crate::power::Allocation;

pub use kbest::{RankedProduct, RankedSubsets};
pub use tree::{realize_mapping, Children, MappingBlock, PairFrontier, SearchNode, SearchTree, SubsetMapping};

/// Counters describing one tree search.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverStats {
    /// Non-root nodes entered (leaves included).
    pub nodes_visited: u64,
    /// Leaves enumerated, `N_sol`.
    pub leaves: u64,
    /// Cut events: a node's remaining children or sub-tree dismissed.
    pub nodes_pruned: u64,
    /// Size of the compact solution space.
    pub compact_space_size: BigUint,
    /// False when the iteration budget ran out before optimality was proven.
    pub complete: bool,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Apply the stopping and pruning rules. Without them the tree is enumerated exhaustively.
    pub pruning: bool,
    /// Branch agents by descending priority instead of index order.
    pub agent_ordering: bool,
    /// Start with the greedy pairing as the incumbent, so the search only
    /// enters sub-trees that can beat it. Ignored without pruning.
    pub warm_start: bool,
    /// Give up after this many child expansions and frontier candidates and return the best leaf so
    /// far, flagged incomplete. `None` searches to proven optimality.
    pub max_iterations: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pruning: true,
            agent_ordering: true,
            warm_start: false,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimalSolution {
    pub pairing: Pairing,
    /// `F` of the returned pairing.
    pub objective: f64,
    /// Local objectives `f_1..f_K` (search order) on the path to the optimum.
    pub path_objectives: Vec<f64>,
    pub agent_order: Vec<usize>,
    pub stats: SolverStats,
}

/// `psi(i)`: sum of the `|V_i|` cheapest costs of agent `i`.
pub fn agent_priority(pattern: &SparsityPattern, costs: &CostMatrix, agent: usize) -> f64 {
    let mut row = costs.row(agent).to_vec();
    row.sort_by(f64::total_cmp);
    row[..pattern.row_sum(agent).min(row.len())].iter().sum()
}

/// Agents by descending `psi`, ties by ascending index.
pub fn agent_priority_order(pattern: &SparsityPattern, costs: &CostMatrix) -> Vec<usize> {
    let psi: Vec<f64> = (0..pattern.num_agents())
        .map(|k| agent_priority(pattern, costs, k))
        .collect();
    let mut order: Vec<usize> = (0..pattern.num_agents()).collect();
    order.sort_by(|&a, &b| psi[b].total_cmp(&psi[a]).then(a.cmp(&b)));
    order
}

/// `M! / prod_q |H_q|!` for homogeneous subsets of the given sizes (`M` is their sum).
pub fn compact_space_size(group_sizes: &[usize]) -> BigUint {
    let m: usize = group_sizes.iter().sum();
    let mut num = factorial(m);
    for &s in group_sizes {
        num /= factorial(s);
    }
    num
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

struct Frame {
    node: SearchNode,
    children: Children,
    /// Remaining candidates when the full child list has been replaced by its frontier.
    frontier: Option<PairFrontier>,
    /// Best sub-tree objective (max of local objectives below this node) seen so far.
    best_below: f64,
}

impl Frame {
    fn new(tree: &SearchTree, node: SearchNode) -> Self {
        Self {
            children: tree.children(&node),
            node,
            frontier: None,
            best_below: f64::INFINITY,
        }
    }
}

/// Optimal pairing for `M = V` (pad with dummy voxels first).
pub fn dfs_optimal(pattern: &SparsityPattern, costs: &CostMatrix) -> Result<OptimalSolution> {
    dfs_optimal_with(pattern, costs, SolverOptions::default())
}

pub fn dfs_optimal_with(
    pattern: &SparsityPattern,
    costs: &CostMatrix,
    options: SolverOptions,
) -> Result<OptimalSolution> {
    let started = Instant::now();
    let k = pattern.num_agents();
    let order: Vec<usize> = if options.agent_ordering {
        agent_priority_order(pattern, costs)
    } else {
        (0..k).collect()
    };
    let tree = SearchTree::new(pattern, costs, &order)?;

    let mut stats = SolverStats {
        nodes_visited: 0,
        leaves: 0,
        nodes_pruned: 0,
        compact_space_size: compact_space_size(&tree.partition().group_sizes()),
        complete: true,
        wall_time_secs: 0.0,
    };
    let mut iterations = 0u64;
    let warm = if options.pruning && options.warm_start {
        let pairing = greedy_pairing(pattern, costs)?;
        let obj = objective(&pairing, pattern, costs)?;
        Some((
            obj.value,
            pairing,
            order.iter().map(|&a| obj.per_agent[a]).collect::<Vec<f64>>(),
        ))
    } else {
        None
    };
    let warm_value = warm.as_ref().map_or(f64::INFINITY, |w| w.0);

    let mut stack = vec![Frame::new(&tree, tree.root())];
    let mut best: Option<(f64, SearchNode, Vec<f64>)> = None;

    while let Some(top) = stack.last_mut() {
        iterations += 1;
        if (best.is_some() || warm.is_some()) && options.max_iterations.is_some_and(|cap| iterations > cap) {
            stats.complete = false;
            break;
        }
        let incumbent = best.as_ref().map_or(warm_value, |b| b.0);
        if options.pruning && top.node.depth() + 2 == k && top.children.emitted() == 1 && top.frontier.is_none() {
            let threshold = incumbent.min(top.best_below);
            if threshold.is_finite() {
                let remaining = options.max_iterations.map(|cap| cap.saturating_sub(iterations));
                let (items, work) = tree.final_pair_frontier(&mut top.children, threshold, remaining);
                iterations += work;
                let Some(items) = items else {
                    stats.complete = false;
                    break;
                };
                top.frontier = Some(items);
            }
        }
        let next = match top.frontier.as_mut() {
            Some(items) => {
                let item = items.next();
                iterations += items.take_work();
                item
            }
            None => tree.next_ranked(&mut top.children),
        };
        let Some((f, ranks)) = next else {
            stack.pop();
            continue;
        };
        if options.pruning && (f >= top.best_below || f >= incumbent) {
            // Later siblings cost at least as much as this one.
            stats.nodes_pruned += 1;
            stack.pop();
            continue;
        }
        if options.pruning && top.node.depth() + 1 < k {
            let bound = tree.child_lower_bound(&mut top.children, &ranks);
            if bound >= top.best_below || bound >= incumbent {
                stats.nodes_pruned += 1;
                continue;
            }
        }
        let child = tree.child_from_ranks(&mut top.children, f, &ranks);
        stats.nodes_visited += 1;
        if child.depth() < k {
            stack.push(Frame::new(&tree, child));
            continue;
        }

        stats.leaves += 1;
        // Frame i sits at depth i; its sub-tree objective is max(f_{i+1}, .., f_K).
        let mut suffix_max = f;
        for i in (0..stack.len()).rev() {
            if i + 1 < stack.len() {
                suffix_max = suffix_max.max(stack[i + 1].node.local_objective());
            }
            stack[i].best_below = stack[i].best_below.min(suffix_max);
        }
        if suffix_max < incumbent {
            let mut path: Vec<f64> = stack[1..].iter().map(|fr| fr.node.local_objective()).collect();
            path.push(f);
            best = Some((suffix_max, child.clone(), path));
        }
        if options.pruning {
            // Cut at the shallowest node whose open child can no longer win.
            for i in 0..stack.len() {
                let open = if i + 1 < stack.len() {
                    stack[i + 1].node.local_objective()
                } else {
                    f
                };
                if open >= stack[i].best_below {
                    stats.nodes_pruned += 1;
                    stack.truncate(i);
                    break;
                }
            }
        }
    }

    let searched = match best {
        Some((_, leaf, path)) => {
            let pairing = tree.realize(&leaf);
            let value = objective(&pairing, pattern, costs)?.value;
            Some((value, pairing, path))
        }
        None => None,
    };
    // The tree sums costs in a different order than `objective`, so compare
    // the two candidates on equal terms.
    let (objective, pairing, path_objectives) = match (searched, warm) {
        (Some(s), Some(w)) => {
            if w.0 < s.0 {
                w
            } else {
                s
            }
        }
        (Some(s), None) => s,
        (None, Some(w)) => w,
        (None, None) => unreachable!("the tree has at least one leaf"),
    };
    stats.wall_time_secs = started.elapsed().as_secs_f64();
    Ok(OptimalSolution {
        pairing,
        objective,
        path_objectives,
        agent_order: order,
        stats,
    })
}

/// Optimal pairing for any `M >= V`: pads with dummy voxels, solves, and
/// returns the pairing of the real voxels only.
pub fn optimal_pairing(pattern: &SparsityPattern, costs: &CostMatrix) -> Result<OptimalSolution> {
    optimal_pairing_with(pattern, costs, SolverOptions::default())
}

pub fn optimal_pairing_with(
    pattern: &SparsityPattern,
    costs: &CostMatrix,
    options: SolverOptions,
) -> Result<OptimalSolution> {
    let real = pattern.num_voxels();
    if costs.num_subcarriers() < real {
        return Err(Error::InvalidDimension(format!(
            "need at least as many subcarriers as voxels (M = {}, V = {real})",
            costs.num_subcarriers()
        )));
    }
    let padded = augment_dummy_voxels(pattern, costs.num_subcarriers())?;
    let mut sol = dfs_optimal_with(&padded, costs, options)?;
    sol.pairing = sol.pairing.truncated(real);
    sol.objective = objective(&sol.pairing, pattern, costs)?.value;
    Ok(sol)
}

/// Optimal pairing followed by the equal-SNR power allocation.
pub fn optimal_voca_ppa(
    pattern: &SparsityPattern,
    channels: &ChannelMatrix,
    p_max: f64,
    noise_power: f64,
) -> Result<(Allocation, SolverStats)> {
    let costs = cost_matrix(channels, noise_power)?;
    let sol = optimal_pairing(pattern, &costs)?;
    let alloc = Allocation::with_optimal_power(sol.pairing, pattern.clone(), channels, p_max, noise_power)?;
    Ok((alloc, sol.stats))
}
