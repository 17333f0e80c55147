//! Sparsity-prioritised greedy pairing.
//!
//! Voxels are visited in descending order of participating agents (ties by
//! voxel index). Each takes the free subcarrier minimising the largest
//! participating-agent cost, ties by lowest subcarrier index.

use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, CostMatrix, SparsityPattern};
use crate::pairing::Pairing;
use crate::power::Allocation;

/// Visit order of voxels: descending column sum, ascending index on ties.
/// All-zero (dummy) columns land last.
pub fn voxel_priority_order(pattern: &SparsityPattern) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pattern.num_voxels()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(pattern.column_sum(v)));
    order
}

/// Per-subcarrier agent lists sorted by descending cost, so the largest
/// participating cost of a voxel on a subcarrier is found by walking the list
/// until the first participating agent.
struct SortedCosts {
    lists: Vec<Vec<(f64, usize)>>,
}

impl SortedCosts {
    fn new(costs: &CostMatrix) -> Self {
        let lists = (0..costs.num_subcarriers())
            .map(|m| {
                let mut col: Vec<(f64, usize)> = (0..costs.num_agents()).map(|k| (costs.get(k, m), k)).collect();
                col.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                col
            })
            .collect();
        Self { lists }
    }

    /// `max_k c[k][m] * S[k][v]`
    #[inline]
    fn worst_cost(&self, m: usize, pattern: &SparsityPattern, v: usize) -> f64 {
        self.lists[m]
            .iter()
            .find(|&&(_, k)| pattern.get(k, v))
            .map_or(0.0, |&(c, _)| c)
    }
}

/// Greedy pairing of every voxel of `pattern` (dummies included) to a distinct subcarrier.
pub fn greedy_pairing(pattern: &SparsityPattern, costs: &CostMatrix) -> Result<Pairing> {
    let v_count = pattern.num_voxels();
    let m_count = costs.num_subcarriers();
    if pattern.num_agents() != costs.num_agents() {
        return Err(Error::DimensionMismatch(format!(
            "sparsity pattern has {} agents, cost matrix has {}",
            pattern.num_agents(),
            costs.num_agents()
        )));
    }
    if m_count < v_count {
        return Err(Error::InvalidDimension(format!(
            "need at least as many subcarriers as voxels (M = {m_count}, V = {v_count})"
        )));
    }
    let sorted = SortedCosts::new(costs);
    let mut used = vec![false; m_count];
    let mut assignment = vec![usize::MAX; v_count];
    for v in voxel_priority_order(pattern) {
        let mut best: Option<(f64, usize)> = None;
        for m in (0..m_count).filter(|&m| !used[m]) {
            let score = sorted.worst_cost(m, pattern, v);
            if best.is_none_or(|(b, _)| score < b) {
                best = Some((score, m));
            }
        }
        let (_, m) = best.expect("a free subcarrier exists while M >= V");
        used[m] = true;
        assignment[v] = m;
    }
    Pairing::new(assignment, m_count)
}

/// Greedy pairing followed by the equal-SNR power allocation.
pub fn greedy_voca_ppa(
    pattern: &SparsityPattern,
    channels: &ChannelMatrix,
    p_max: f64,
    noise_power: f64,
) -> Result<Allocation> {
    let costs = crate::model::cost_matrix(channels, noise_power)?;
    let pairing = greedy_pairing(pattern, &costs)?;
    Allocation::with_optimal_power(pairing, pattern.clone(), channels, p_max, noise_power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{cost_matrix, generate_channels, generate_sparsity, RicianParams};
    use crate::pairing::objective;

    #[test]
    fn priority_order() {
        let s = SparsityPattern::from_rows(&[[1u8, 1], [0, 1]]).unwrap();
        assert_eq!(voxel_priority_order(&s), vec![1, 0]);
        let s = SparsityPattern::from_rows(&[[1u8, 0, 1], [0, 1, 0]]).unwrap();
        assert_eq!(voxel_priority_order(&s), vec![0, 1, 2]);
        let s = SparsityPattern::from_rows(&[[0u8, 0, 0]]).unwrap();
        assert_eq!(voxel_priority_order(&s), vec![0, 1, 2]);
        let s = SparsityPattern::from_rows(&[[0u8, 1, 0, 1], [0, 1, 1, 0]]).unwrap();
        assert_eq!(voxel_priority_order(&s), vec![1, 2, 3, 0]);
    }

    #[test]
    fn worked_instance() {
        let s = SparsityPattern::from_rows(&[[1u8, 1], [0, 1]]).unwrap();
        let c = CostMatrix::from_rows(&[[1.0, 2.0], [4.0, 1.0]]).unwrap();
        let p = greedy_pairing(&s, &c).unwrap();
        assert_eq!(p.assignment(), &[0, 1]);
        assert_eq!(objective(&p, &s, &c).unwrap().value, 3.0);
    }

    #[test]
    fn single_voxel_takes_argmin() {
        let s = SparsityPattern::from_rows(&[[1u8]]).unwrap();
        let c = CostMatrix::from_rows(&[[5.0, 1.0, 7.0]]).unwrap();
        assert_eq!(greedy_pairing(&s, &c).unwrap().assignment(), &[1]);
    }

    #[test]
    fn dummy_voxels_take_leftovers_in_index_order() {
        let s = SparsityPattern::from_rows(&[[1u8, 0, 0]]).unwrap();
        let c = CostMatrix::from_rows(&[[3.0, 1.0, 2.0, 9.0]]).unwrap();
        assert_eq!(greedy_pairing(&s, &c).unwrap().assignment(), &[1, 0, 2]);
    }

    #[test]
    fn inner_max_matches_naive_scan() {
        for seed in 0..20 {
            let h = generate_channels(5, 12, RicianParams::default(), seed).unwrap();
            let c = cost_matrix(&h, 1e-7).unwrap();
            let s = generate_sparsity(5, 12, 0.4, seed + 50).unwrap();
            let sorted = SortedCosts::new(&c);
            for v in 0..12 {
                for m in 0..12 {
                    let naive = (0..5).filter(|&k| s.get(k, v)).map(|k| c.get(k, m)).fold(0.0, f64::max);
                    assert_eq!(sorted.worst_cost(m, &s, v), naive);
                }
            }
        }
    }

    #[test]
    fn single_agent_uses_cheapest_subcarriers() {
        for seed in 0..30 {
            let h = generate_channels(1, 10, RicianParams::default(), seed).unwrap();
            let c = cost_matrix(&h, 1.0).unwrap();
            let s = generate_sparsity(1, 6, 0.5, seed).unwrap();
            let p = greedy_pairing(&s, &c).unwrap();
            let mut row = c.row(0).to_vec();
            row.sort_by(f64::total_cmp);
            let n = s.row_sum(0);
            let expect: f64 = row[..n].iter().sum();
            let got = objective(&p, &s, &c).unwrap().value;
            assert!((got - expect).abs() <= 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn rejects_too_few_subcarriers() {
        let s = SparsityPattern::from_rows(&[[1u8, 1, 1]]).unwrap();
        let c = CostMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(greedy_pairing(&s, &c).is_err());
    }

    #[test]
    fn all_dummy_is_unconstrained() {
        let s = SparsityPattern::from_rows(&[[0u8, 0], [0, 0]]).unwrap();
        let h = ChannelMatrix::unit(2, 3).unwrap();
        let a = greedy_voca_ppa(&s, &h, 1.0, 1.0).unwrap();
        assert!(a.is_unconstrained());
        assert_eq!(a.pairing.assignment(), &[0, 1]);
    }
}
