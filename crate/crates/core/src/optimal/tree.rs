//! Compact search tree over subset-to-subset mappings.
//!
//! A node at depth `d` maps every class of voxels sharing the first `d`
//! signature bits (in search order) to an equal-size set of subcarriers. Its
//! children refine each class by the next agent's bit: a subset of the class's
//! subcarriers goes to the voxels that agent observes, the rest to the others.
//! Children are produced lazily in ascending cost for that agent.

use crate::error::{Error, Result};
use crate::model::{homogeneous_partition, CostMatrix, HomogeneousPartition, SparsityPattern};
use crate::pairing::Pairing;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::kbest::{Candidate, RankedProduct, RankedSubsets};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Block {
    /// Indices into the partition's groups.
    groups: Vec<usize>,
    size: usize,
    /// Subcarriers, ascending.
    image: Vec<usize>,
}

/// One node of the search tree: a partial subset-to-subset mapping plus the
/// local objective of the agent decided at this depth.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode {
    depth: usize,
    local_objective: f64,
    blocks: Vec<Block>,
}

impl SearchNode {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Cost of the agent decided at this depth (zero at the root).
    pub fn local_objective(&self) -> f64 {
        self.local_objective
    }
}

/// A voxel class and the subcarriers it is mapped to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingBlock {
    pub voxels: Vec<usize>,
    pub subcarriers: Vec<usize>,
}

/// Subset-to-subset mapping described by a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetMapping {
    pub depth: usize,
    pub blocks: Vec<MappingBlock>,
}

#[derive(Debug, Clone)]
struct Split {
    ones: Vec<usize>,
    ones_size: usize,
    zeros: Vec<usize>,
    zeros_size: usize,
    image: Vec<usize>,
    /// Voxels of each deeper agent in the ones and zeros part.
    needs: Vec<(usize, usize)>,
    /// Look-ahead terms per computed rank: for each deeper agent, the
    /// cheapest fill of its ones-part and zeros-part needs.
    bounds: Vec<f64>,
    /// Coverage data of the ones and zeros part per computed rank.
    parts: Vec<[Option<Part>; 2]>,
}

/// A set of subcarriers shared by some voxel groups, seen by the coverage
/// bound: every subcarrier must go to some group, and then every deeper agent
/// of that group pays for it.
#[derive(Debug, Clone)]
struct Part {
    image: Vec<usize>,
    /// Deeper agents of each group, bit `j` for the `j`-th deeper agent.
    masks: Vec<u64>,
    /// Per deeper agent, its `n`-th cheapest cost in the part, `n` being its
    /// voxel count there. A subcarrier dearer than this raises its fill.
    thresholds: Vec<f64>,
}

/// Lazy cursor over the children of one node.
#[derive(Debug, Clone)]
pub struct Children {
    depth: usize,
    fixed: Vec<Block>,
    splits: Vec<Split>,
    product: RankedProduct,
    last_key: f64,
    emitted: u64,
    /// Look-ahead contribution of the unsplit blocks, per deeper agent.
    fixed_bound: Vec<f64>,
    fixed_parts: Vec<Part>,
}

impl Children {
    /// Number of children drawn from the ranked list so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }
}

/// Children two levels above the leaves that are Pareto-optimal in (own cost,
/// last-agent cost), produced lazily in ascending own cost.
///
/// A best-first merge over per-block option lists, each ascending in own cost
/// and strictly descending in last-agent cost. Merged candidates whose
/// last-agent cost does not beat every earlier one are dropped.
#[derive(Debug, Clone)]
pub struct PairFrontier {
    /// Per split block: `(own cost, last-agent cost, rank)`.
    options: Vec<Vec<(f64, f64, u32)>>,
    base_x: f64,
    base_y: f64,
    threshold: f64,
    heap: BinaryHeap<Reverse<Candidate>>,
    seen: HashSet<Vec<u32>>,
    floor: f64,
    work: u64,
}

impl PairFrontier {
    fn push(&mut self, index: Vec<u32>) {
        if self.seen.contains(&index) {
            return;
        }
        let key = self
            .options
            .iter()
            .zip(&index)
            .fold(self.base_x, |acc, (o, &i)| acc + o[i as usize].0);
        self.seen.insert(index.clone());
        self.heap.push(Reverse(Candidate { key, index }));
    }

    /// Candidates examined since the last call.
    pub fn take_work(&mut self) -> u64 {
        std::mem::take(&mut self.work)
    }
}

impl Iterator for PairFrontier {
    type Item = (f64, Vec<u32>);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let Reverse(best) = self.heap.pop()?;
            self.work += 1;
            if best.key >= self.threshold {
                // Everything left costs at least as much.
                self.heap.clear();
                return None;
            }
            for b in 0..best.index.len() {
                if (best.index[b] as usize) + 1 < self.options[b].len() {
                    let mut next = best.index.clone();
                    next[b] += 1;
                    self.push(next);
                }
            }
            let y = self
                .options
                .iter()
                .zip(&best.index)
                .fold(self.base_y, |acc, (o, &i)| acc + o[i as usize].1);
            if y >= self.threshold || y >= self.floor {
                continue;
            }
            self.floor = y;
            let ranks: Vec<u32> = self
                .options
                .iter()
                .zip(&best.index)
                .map(|(o, &i)| o[i as usize].2)
                .collect();
            if ranks.iter().any(|&r| r != 0) {
                return Some((best.key, ranks));
            }
        }
    }
}

/// Search tree for one instance with a fixed agent order.
#[derive(Debug, Clone)]
pub struct SearchTree {
    costs: CostMatrix,
    partition: HomogeneousPartition,
    /// Group signatures with bit `d` referring to the `d`-th agent in search order.
    signatures: Vec<u64>,
    agent_order: Vec<usize>,
    num_subcarriers: usize,
}

impl SearchTree {
    /// `agent_order[d]` is the agent branched on at depth `d + 1`.
    pub fn new(pattern: &SparsityPattern, costs: &CostMatrix, agent_order: &[usize]) -> Result<Self> {
        let k = pattern.num_agents();
        if costs.num_agents() != k {
            return Err(Error::DimensionMismatch(format!(
                "sparsity pattern has {k} agents, cost matrix has {}",
                costs.num_agents()
            )));
        }
        if pattern.num_voxels() != costs.num_subcarriers() {
            return Err(Error::DimensionMismatch(format!(
                "tree search needs M = V (pad with dummy voxels), got V = {}, M = {}",
                pattern.num_voxels(),
                costs.num_subcarriers()
            )));
        }
        let mut seen = vec![false; k];
        if agent_order.len() != k
            || agent_order
                .iter()
                .any(|&a| a >= k || std::mem::replace(&mut seen[a], true))
        {
            return Err(Error::InvalidParameter(format!(
                "{agent_order:?} is not a permutation of 0..{k}"
            )));
        }
        let partition = homogeneous_partition(pattern);
        let signatures = partition
            .groups()
            .iter()
            .map(|g| {
                agent_order
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| g.signature >> a & 1 == 1)
                    .fold(0u64, |acc, (d, _)| acc | 1 << d)
            })
            .collect();
        Ok(Self {
            costs: costs.permute_agents(agent_order),
            partition,
            signatures,
            agent_order: agent_order.to_vec(),
            num_subcarriers: costs.num_subcarriers(),
        })
    }

    pub fn num_agents(&self) -> usize {
        self.agent_order.len()
    }

    pub fn agent_order(&self) -> &[usize] {
        &self.agent_order
    }

    pub fn partition(&self) -> &HomogeneousPartition {
        &self.partition
    }

    pub fn root(&self) -> SearchNode {
        SearchNode {
            depth: 0,
            local_objective: 0.0,
            blocks: vec![Block {
                groups: (0..self.partition.len()).collect(),
                size: self.num_subcarriers,
                image: (0..self.num_subcarriers).collect(),
            }],
        }
    }

    /// Starts enumerating the children of a non-leaf node.
    pub fn children(&self, node: &SearchNode) -> Children {
        assert!(node.depth < self.num_agents(), "leaf nodes have no children");
        let d = node.depth;
        let row = self.costs.row(d);
        let groups = self.partition.groups();
        let mut fixed = Vec::new();
        let mut splits = Vec::new();
        let mut lists = Vec::new();
        let mut base = 0.0;
        for block in &node.blocks {
            let (ones, zeros): (Vec<usize>, Vec<usize>) =
                block.groups.iter().partition(|&&g| self.signatures[g] >> d & 1 == 1);
            let ones_size: usize = ones.iter().map(|&g| groups[g].len()).sum();
            if ones_size == 0 || ones_size == block.size {
                if ones_size == block.size {
                    base += block.image.iter().map(|&m| row[m]).sum::<f64>();
                }
                fixed.push(block.clone());
                continue;
            }
            let weights: Vec<f64> = block.image.iter().map(|&m| row[m]).collect();
            lists.push(RankedSubsets::new(&weights, ones_size));
            let needs = (d + 1..self.num_agents())
                .map(|a| (self.need(&ones, a), self.need(&zeros, a)))
                .collect();
            splits.push(Split {
                ones,
                ones_size,
                zeros,
                zeros_size: block.size - ones_size,
                image: block.image.clone(),
                needs,
                bounds: Vec::new(),
                parts: Vec::new(),
            });
        }
        let mut scratch = Vec::new();
        let fixed_bound = (d + 1..self.num_agents())
            .map(|a| {
                let row = self.costs.row(a);
                let mut total = 0.0;
                for block in &fixed {
                    let need = self.need(&block.groups, a);
                    if need > 0 {
                        scratch.clear();
                        scratch.extend(block.image.iter().map(|&m| row[m]));
                        total += cheapest_sum(&mut scratch, need);
                    }
                }
                total
            })
            .collect();
        let fixed_parts = fixed
            .iter()
            .filter_map(|b| self.part(d + 1, &b.groups, &b.image))
            .collect();
        Children {
            depth: d + 1,
            fixed_parts,
            fixed,
            splits,
            product: RankedProduct::new(lists, base),
            last_key: f64::NEG_INFINITY,
            emitted: 0,
            fixed_bound,
        }
    }

    /// Voxels among `groups` that the agent at search depth `a + 1` observes.
    fn need(&self, groups: &[usize], a: usize) -> usize {
        let all = self.partition.groups();
        groups
            .iter()
            .filter(|&&g| self.signatures[g] >> a & 1 == 1)
            .map(|&g| all[g].len())
            .sum()
    }

    /// [`Self::lower_bound`] of the child with the given ranks, without
    /// building it. Per-block terms are cached, and they are added in the same
    /// order as for the built child, so the two agree exactly.
    pub fn child_lower_bound(&self, children: &mut Children, ranks: &[u32]) -> f64 {
        let deeper = self.num_agents() - children.depth;
        if deeper == 0 {
            return 0.0;
        }
        let mut scratch = Vec::new();
        for (b, &r) in ranks.iter().enumerate() {
            let split = &mut children.splits[b];
            let list = &mut children.product.lists_mut()[b];
            while split.bounds.len() <= r as usize * deeper * 2 {
                let rank = split.bounds.len() / (deeper * 2);
                let chosen = list.subset(rank).expect("rank was produced by the list");
                let mut take = vec![false; split.image.len()];
                for &i in &chosen {
                    take[i] = true;
                }
                for (offset, &(n_ones, n_zeros)) in split.needs.iter().enumerate() {
                    let row = self.costs.row(children.depth + offset);
                    for (part, n) in [(true, n_ones), (false, n_zeros)] {
                        scratch.clear();
                        scratch.extend(
                            split
                                .image
                                .iter()
                                .zip(&take)
                                .filter(|&(_, &t)| t == part)
                                .map(|(&m, _)| row[m]),
                        );
                        split.bounds.push(cheapest_sum(&mut scratch, n));
                    }
                }
                let image = |part: bool| -> Vec<usize> {
                    split
                        .image
                        .iter()
                        .zip(&take)
                        .filter(|&(_, &t)| t == part)
                        .map(|(&m, _)| m)
                        .collect()
                };
                let parts = [
                    self.part(children.depth, &split.ones, &image(true)),
                    self.part(children.depth, &split.zeros, &image(false)),
                ];
                split.parts.push(parts);
            }
        }
        let mut bound = 0.0f64;
        let mut fills = Vec::with_capacity(deeper);
        for a in 0..deeper {
            let mut total = children.fixed_bound[a];
            for (split, &r) in children.splits.iter().zip(ranks) {
                let at = (r as usize * deeper + a) * 2;
                total += split.bounds[at];
                total += split.bounds[at + 1];
            }
            fills.push(total);
            bound = bound.max(total);
        }
        let parts = children.fixed_parts.iter().chain(
            children
                .splits
                .iter()
                .zip(ranks)
                .flat_map(|(split, &r)| split.parts[r as usize].iter().flatten()),
        );
        bound.max(self.coverage_bound(children.depth, &fills, parts))
    }

    /// Coverage data of a block for a node at `depth`, or `None` if some
    /// group in it has no deeper agent and can take any subcarrier for free.
    fn part(&self, depth: usize, groups: &[usize], image: &[usize]) -> Option<Part> {
        let deeper = self.num_agents() - depth;
        if deeper < 2 {
            // A single remaining agent is covered by its own fill.
            return None;
        }
        let masks: Vec<u64> = groups.iter().map(|&g| self.signatures[g] >> depth).collect();
        if masks.contains(&0) {
            return None;
        }
        let mut scratch = Vec::with_capacity(image.len());
        let thresholds = (depth..self.num_agents())
            .map(|a| {
                let need = self.need(groups, a);
                if need == 0 {
                    return f64::NAN;
                }
                let row = self.costs.row(a);
                scratch.clear();
                scratch.extend(image.iter().map(|&m| row[m]));
                *scratch.select_nth_unstable_by(need - 1, f64::total_cmp).1
            })
            .collect();
        Some(Part {
            image: image.to_vec(),
            masks,
            thresholds,
        })
    }

    /// Every subcarrier of a part goes to one of its groups, and each deeper
    /// agent of that group then pays at least its fill plus the subcarrier's
    /// excess over its threshold. The cheapest group gives a bound per
    /// subcarrier. Shrunk by a relative `1e-12` so that rounding in the fill
    /// sums can never push it above a reachable objective.
    fn coverage_bound<'a>(&self, depth: usize, fills: &[f64], parts: impl Iterator<Item = &'a Part>) -> f64 {
        let mut bound = 0.0f64;
        for part in parts {
            for &m in &part.image {
                let mut cheapest = f64::INFINITY;
                for &mask in &part.masks {
                    let mut worst = 0.0f64;
                    let mut bits = mask;
                    while bits != 0 {
                        let j = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let excess = (self.costs.get(depth + j, m) - part.thresholds[j]).max(0.0);
                        worst = worst.max(fills[j] + excess);
                    }
                    cheapest = cheapest.min(worst);
                }
                bound = bound.max(cheapest);
            }
        }
        bound * (1.0 - 1e-12)
    }

    /// Lower bound on the cost of every agent deeper than `node`: each agent
    /// fills its voxels in every block with the cheapest subcarriers of that
    /// block's image. For the next agent this is exactly the first child's cost.
    ///
    /// Also applies the coverage bound: each free subcarrier ends up with some
    /// group, whose deeper agents must absorb it.
    pub fn lower_bound(&self, node: &SearchNode) -> f64 {
        let groups = self.partition.groups();
        let mut bound = 0.0f64;
        let mut fills = Vec::new();
        let mut scratch = Vec::with_capacity(self.num_subcarriers);
        for d in node.depth..self.num_agents() {
            let row = self.costs.row(d);
            let mut total = 0.0;
            for block in &node.blocks {
                let need: usize = block
                    .groups
                    .iter()
                    .filter(|&&g| self.signatures[g] >> d & 1 == 1)
                    .map(|&g| groups[g].len())
                    .sum();
                if need == 0 {
                    continue;
                }
                scratch.clear();
                scratch.extend(block.image.iter().map(|&m| row[m]));
                total += cheapest_sum(&mut scratch, need);
            }
            fills.push(total);
            bound = bound.max(total);
        }
        let parts: Vec<Part> = node
            .blocks
            .iter()
            .filter_map(|b| self.part(node.depth, &b.groups, &b.image))
            .collect();
        bound.max(self.coverage_bound(node.depth, &fills, parts.iter()))
    }

    /// Local objective and ranks of the next child in ascending local
    /// objective, or `None` once exhausted.
    pub fn next_ranked(&self, children: &mut Children) -> Option<(f64, Vec<u32>)> {
        let (key, ranks) = children.product.next()?;
        assert!(
            key >= children.last_key,
            "children must come out in non-decreasing local objective"
        );
        children.last_key = key;
        children.emitted += 1;
        Some((key, ranks))
    }

    /// Next child in ascending local objective, or `None` once exhausted.
    pub fn next_child(&self, children: &mut Children) -> Option<SearchNode> {
        let (key, ranks) = self.next_ranked(children)?;
        Some(self.child_from_ranks(children, key, &ranks))
    }

    /// Builds the child selecting the `ranks[b]`-th best subset in every split block.
    pub fn child_from_ranks(&self, children: &mut Children, key: f64, ranks: &[u32]) -> SearchNode {
        let mut blocks = children.fixed.clone();
        for (b, split) in children.splits.iter().enumerate() {
            let chosen = children.product.lists_mut()[b]
                .subset(ranks[b] as usize)
                .expect("rank was produced by the list");
            let mut take = vec![false; split.image.len()];
            for &i in &chosen {
                take[i] = true;
            }
            let mut ones_image = Vec::with_capacity(split.ones_size);
            let mut zeros_image = Vec::with_capacity(split.zeros_size);
            for (&m, &t) in split.image.iter().zip(&take) {
                if t {
                    ones_image.push(m);
                } else {
                    zeros_image.push(m);
                }
            }
            blocks.push(Block {
                groups: split.ones.clone(),
                size: split.ones_size,
                image: ones_image,
            });
            blocks.push(Block {
                groups: split.zeros.clone(),
                size: split.zeros_size,
                image: zeros_image,
            });
        }
        SearchNode {
            depth: children.depth,
            local_objective: key,
            blocks,
        }
    }

    /// For the children of a node two levels above the leaves: every child
    /// other than the first whose own cost and last-agent cost are both below
    /// `threshold` and that is not dominated in both by another child. The
    /// result yields `(key, ranks)` in ascending key, ready for
    /// [`Self::child_from_ranks`].
    ///
    /// A child outside this list can never be entered by the search once the
    /// first child has set a finite threshold, so iterating it instead of the
    /// full ranked list leaves the search unchanged.
    ///
    /// Also returns the number of per-block candidates examined. With a
    /// `limit`, gives up and returns `None` once that many have been examined.
    pub fn final_pair_frontier(
        &self,
        children: &mut Children,
        threshold: f64,
        limit: Option<u64>,
    ) -> (Option<PairFrontier>, u64) {
        let mut work = 0u64;
        let over = |work: u64| limit.is_some_and(|l| work > l);
        assert_eq!(
            children.depth + 1,
            self.num_agents(),
            "frontier applies two levels above the leaves"
        );
        let last = children.depth;
        let groups = self.partition.groups();
        let row = self.costs.row(last);
        let need = |gs: &[usize]| -> usize {
            gs.iter()
                .filter(|&&g| self.signatures[g] >> last & 1 == 1)
                .map(|&g| groups[g].len())
                .sum()
        };
        let mut scratch = Vec::new();
        let mut cheapest = |costs: &mut dyn Iterator<Item = f64>, n: usize| -> f64 {
            scratch.clear();
            scratch.extend(costs);
            cheapest_sum(&mut scratch, n)
        };

        let base_x = children.product.base();
        let base_y: f64 = children
            .fixed
            .iter()
            .map(|b| cheapest(&mut b.image.iter().map(|&m| row[m]), need(&b.groups)))
            .sum();

        let nb = children.splits.len();
        let mut min_x = Vec::with_capacity(nb);
        let mut min_y = Vec::with_capacity(nb);
        for (b, split) in children.splits.iter().enumerate() {
            min_x.push(children.product.lists_mut()[b].weight(0).expect("lists are nonempty"));
            let n = need(&split.ones) + need(&split.zeros);
            min_y.push(cheapest(&mut split.image.iter().map(|&m| row[m]), n));
        }
        let sum_min_x: f64 = min_x.iter().sum();
        // Per-block caps leave room for every other block at its minimum.
        let sum_min_y: f64 = min_y.iter().sum();

        // Per block: options (x, y, rank) with x ascending and y strictly decreasing.
        let mut options: Vec<Vec<(f64, f64, u32)>> = Vec::with_capacity(nb);
        for (b, split) in children.splits.iter().enumerate() {
            let x_cap = threshold - base_x - (sum_min_x - min_x[b]);
            let y_cap = threshold - base_y - (sum_min_y - min_y[b]);
            let (n_ones, n_zeros) = (need(&split.ones), need(&split.zeros));
            let list = &mut children.product.lists_mut()[b];
            let mut opts = Vec::new();
            let mut best_y = f64::INFINITY;
            let mut taken = vec![false; split.image.len()];
            for j in 0.. {
                work += 1;
                if over(work) {
                    return (None, work);
                }
                let Some(x) = list.weight(j) else { break };
                if x >= x_cap || best_y <= min_y[b] {
                    break;
                }
                let chosen = list.subset(j).expect("weight exists");
                taken.iter_mut().for_each(|t| *t = false);
                for &i in &chosen {
                    taken[i] = true;
                }
                let image = &split.image;
                let y = cheapest(&mut chosen.iter().map(|&i| row[image[i]]), n_ones)
                    + cheapest(
                        &mut (0..image.len()).filter(|&i| !taken[i]).map(|i| row[image[i]]),
                        n_zeros,
                    );
                if y < best_y && y < y_cap {
                    best_y = y;
                    opts.push((x, y, j as u32));
                }
            }
            options.push(opts);
        }

        let mut frontier = PairFrontier {
            options,
            base_x,
            base_y,
            threshold,
            heap: BinaryHeap::new(),
            seen: HashSet::new(),
            floor: f64::INFINITY,
            work: 0,
        };
        if frontier.options.iter().all(|o| !o.is_empty()) {
            frontier.push(vec![0; nb]);
        }
        (Some(frontier), work)
    }

    pub fn mapping(&self, node: &SearchNode) -> SubsetMapping {
        let groups = self.partition.groups();
        let blocks = node
            .blocks
            .iter()
            .map(|b| {
                let mut voxels: Vec<usize> = b
                    .groups
                    .iter()
                    .flat_map(|&g| groups[g].voxels.iter().copied())
                    .collect();
                voxels.sort_unstable();
                MappingBlock {
                    voxels,
                    subcarriers: b.image.clone(),
                }
            })
            .collect();
        SubsetMapping {
            depth: node.depth,
            blocks,
        }
    }

    /// Turns a leaf into a concrete pairing: within each homogeneous subset,
    /// voxels take the mapped subcarriers in ascending order.
    pub fn realize(&self, leaf: &SearchNode) -> Pairing {
        assert_eq!(leaf.depth, self.num_agents(), "only leaves determine a pairing");
        realize_mapping(&self.mapping(leaf), self.num_subcarriers)
    }
}

/// Sum of the `n` smallest values; reorders `values`.
fn cheapest_sum(values: &mut [f64], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n < values.len() {
        values.select_nth_unstable_by(n - 1, f64::total_cmp);
    }
    values[..n].sort_unstable_by(f64::total_cmp);
    values[..n].iter().sum()
}

/// Matches voxels to subcarriers block by block in ascending index order.
pub fn realize_mapping(mapping: &SubsetMapping, num_subcarriers: usize) -> Pairing {
    let num_voxels: usize = mapping.blocks.iter().map(|b| b.voxels.len()).sum();
    let mut assignment = vec![usize::MAX; num_voxels];
    for block in &mapping.blocks {
        let mut voxels = block.voxels.clone();
        let mut subs = block.subcarriers.clone();
        voxels.sort_unstable();
        subs.sort_unstable();
        for (v, m) in voxels.into_iter().zip(subs) {
            assignment[v] = m;
        }
    }
    Pairing::new(assignment, num_subcarriers).expect("blocks partition voxels and subcarriers")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_block_two_children() {
        // One agent observing only v2; costs (4, 1) on (m1, m2).
        let s = SparsityPattern::from_rows(&[[0u8, 1], [1, 1]]).unwrap();
        let c = CostMatrix::from_rows(&[[4.0, 1.0], [1.0, 1.0]]).unwrap();
        let tree = SearchTree::new(&s, &c, &[0, 1]).unwrap();
        let root = tree.root();
        assert_eq!(tree.mapping(&root).blocks.len(), 1);
        let mut kids = tree.children(&root);
        let first = tree.next_child(&mut kids).unwrap();
        assert_eq!(first.local_objective(), 1.0);
        let map = tree.mapping(&first);
        let ones = map.blocks.iter().find(|b| b.voxels == vec![1]).unwrap();
        assert_eq!(ones.subcarriers, vec![1]);
        let second = tree.next_child(&mut kids).unwrap();
        assert_eq!(second.local_objective(), 4.0);
        let map = tree.mapping(&second);
        let ones = map.blocks.iter().find(|b| b.voxels == vec![1]).unwrap();
        assert_eq!(ones.subcarriers, vec![0]);
        assert!(tree.next_child(&mut kids).is_none());
    }

    #[test]
    fn all_sparse_agent_has_one_zero_child() {
        let s = SparsityPattern::from_rows(&[[0u8, 0, 0], [1, 0, 1]]).unwrap();
        let c = CostMatrix::from_rows(&[[4.0, 1.0, 2.0], [1.0, 1.0, 1.0]]).unwrap();
        let tree = SearchTree::new(&s, &c, &[0, 1]).unwrap();
        let mut kids = tree.children(&tree.root());
        let only = tree.next_child(&mut kids).unwrap();
        assert_eq!(only.local_objective(), 0.0);
        assert!(tree.next_child(&mut kids).is_none());
    }

    #[test]
    fn realize_ascending_within_block() {
        let mapping = SubsetMapping {
            depth: 1,
            blocks: vec![
                MappingBlock {
                    voxels: vec![7, 3],
                    subcarriers: vec![5, 2],
                },
                MappingBlock {
                    voxels: vec![0, 1, 2, 4, 5, 6],
                    subcarriers: vec![0, 1, 3, 4, 6, 7],
                },
            ],
        };
        let p = realize_mapping(&mapping, 8);
        assert_eq!(p.subcarrier(3), 2);
        assert_eq!(p.subcarrier(7), 5);
        assert_eq!(p.subcarrier(0), 0);
    }

    #[test]
    fn coverage_bound_charges_an_expensive_subcarrier() {
        let s = SparsityPattern::from_rows(&[[1u8, 1, 0], [0, 0, 1]]).unwrap();
        let c = CostMatrix::from_rows(&[[1.0, 1.0, 100.0], [1.0, 1.0, 50.0]]).unwrap();
        let tree = SearchTree::new(&s, &c, &[0, 1]).unwrap();
        // Subcarrier 2 costs agent 1 at least 50 and agent 0 at least 101.
        let bound = tree.lower_bound(&tree.root());
        assert!(bound > 49.99 && bound <= 50.0);
    }

    #[test]
    fn cached_bound_matches_built_child() {
        use crate::model::{cost_matrix, generate_channels, generate_sparsity, RicianParams};
        for seed in 0..30 {
            let h = generate_channels(4, 10, RicianParams::default(), seed).unwrap();
            let s = generate_sparsity(4, 10, 1.0 / 3.0, seed + 100).unwrap();
            let c = cost_matrix(&h, 1e-7).unwrap();
            let tree = SearchTree::new(&s, &c, &[2, 0, 3, 1]).unwrap();
            let mut frontier = vec![tree.root()];
            let mut checked = 0;
            while let Some(node) = frontier.pop() {
                if node.depth() == tree.num_agents() || checked > 400 {
                    continue;
                }
                let mut kids = tree.children(&node);
                for _ in 0..6 {
                    let Some((key, ranks)) = tree.next_ranked(&mut kids) else {
                        break;
                    };
                    let cached = tree.child_lower_bound(&mut kids, &ranks);
                    let child = tree.child_from_ranks(&mut kids, key, &ranks);
                    assert_eq!(cached.to_bits(), tree.lower_bound(&child).to_bits());
                    checked += 1;
                    frontier.push(child);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = SparsityPattern::from_rows(&[[0u8, 1]]).unwrap();
        let c = CostMatrix::from_rows(&[[4.0, 1.0, 2.0]]).unwrap();
        assert!(SearchTree::new(&s, &c, &[0]).is_err());
        let c = CostMatrix::from_rows(&[[4.0, 1.0]]).unwrap();
        assert!(SearchTree::new(&s, &c, &[1]).is_err());
    }
}
