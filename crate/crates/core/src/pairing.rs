//! Voxel-to-subcarrier pairings and the max-linear objective they induce.

use crate::error::{Error, Result};
use crate::model::{CostMatrix, SparsityPattern};

/// Injective assignment of voxels to subcarriers, `m(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    num_subcarriers: usize,
    assignment: Vec<usize>,
}

impl Pairing {
    pub fn new(assignment: Vec<usize>, num_subcarriers: usize) -> Result<Self> {
        if !is_valid_assignment(&assignment, num_subcarriers) {
            return Err(Error::InfeasiblePairing(format!(
                "{assignment:?} is not an injective map into {num_subcarriers} subcarriers"
            )));
        }
        Ok(Self {
            num_subcarriers,
            assignment,
        })
    }

    /// Voxel `v` on subcarrier `v`.
    pub fn sequential(num_voxels: usize, num_subcarriers: usize) -> Result<Self> {
        Self::new((0..num_voxels).collect(), num_subcarriers)
    }

    pub fn num_voxels(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    #[inline]
    pub fn subcarrier(&self, voxel: usize) -> usize {
        self.assignment[voxel]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Inverse map: which voxel (if any) is carried by each subcarrier.
    pub fn voxel_on_subcarrier(&self) -> Vec<Option<usize>> {
        let mut inv = vec![None; self.num_subcarriers];
        for (v, &m) in self.assignment.iter().enumerate() {
            inv[m] = Some(v);
        }
        inv
    }

    /// Keeps only the first `num_voxels` voxels (drops trailing dummies).
    pub fn truncated(&self, num_voxels: usize) -> Self {
        Self {
            num_subcarriers: self.num_subcarriers,
            assignment: self.assignment[..num_voxels.min(self.assignment.len())].to_vec(),
        }
    }

    /// Binary `V x M` pairing matrix `A`.
    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        self.assignment
            .iter()
            .map(|&m| (0..self.num_subcarriers).map(|j| j == m).collect())
            .collect()
    }

    /// Swaps the subcarriers of two voxels.
    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut p = self.clone();
        p.assignment.swap(a, b);
        p
    }
}

fn is_valid_assignment(assignment: &[usize], num_subcarriers: usize) -> bool {
    let mut used = vec![false; num_subcarriers];
    for &m in assignment {
        if m >= num_subcarriers || used[m] {
            return false;
        }
        used[m] = true;
    }
    true
}

/// Checks a binary pairing matrix: every voxel on exactly one subcarrier and
/// every subcarrier carrying at most one voxel.
pub fn validate_pairing(matrix: &[Vec<bool>]) -> bool {
    let Some(m) = matrix.first().map(Vec::len) else {
        return true;
    };
    if matrix.iter().any(|row| row.len() != m) {
        return false;
    }
    let rows_ok = matrix.iter().all(|row| row.iter().filter(|&&a| a).count() == 1);
    let cols_ok = (0..m).all(|j| matrix.iter().filter(|row| row[j]).count() <= 1);
    rows_ok && cols_ok
}

/// Per-agent costs `f_k` and their maximum `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub per_agent: Vec<f64>,
    pub value: f64,
}

/// Evaluates `f_k = sum_{v: S[k][v] = 1} c[k][m(v)]` and `F = max_k f_k`.
///
/// Each `f_k` is summed over its subcarrier set in ascending subcarrier order,
/// so the result depends only on the set `M_k` and is bit-stable under any
/// reshuffling that preserves it.
pub fn objective(pairing: &Pairing, pattern: &SparsityPattern, costs: &CostMatrix) -> Result<Objective> {
    check_dims(pairing, pattern, costs)?;
    let inv = pairing.voxel_on_subcarrier();
    let per_agent: Vec<f64> = (0..pattern.num_agents())
        .map(|k| {
            inv.iter()
                .enumerate()
                .filter_map(|(m, v)| v.filter(|&v| pattern.get(k, v)).map(|_| costs.get(k, m)))
                .sum()
        })
        .collect();
    let value = per_agent.iter().copied().fold(0.0, f64::max);
    Ok(Objective { per_agent, value })
}

pub(crate) fn check_dims(pairing: &Pairing, pattern: &SparsityPattern, costs: &CostMatrix) -> Result<()> {
    if pairing.num_voxels() != pattern.num_voxels() {
        return Err(Error::DimensionMismatch(format!(
            "pairing covers {} voxels, sparsity pattern has {}",
            pairing.num_voxels(),
            pattern.num_voxels()
        )));
    }
    if pattern.num_agents() != costs.num_agents() {
        return Err(Error::DimensionMismatch(format!(
            "sparsity pattern has {} agents, cost matrix has {}",
            pattern.num_agents(),
            costs.num_agents()
        )));
    }
    if pairing.num_subcarriers() != costs.num_subcarriers() {
        return Err(Error::DimensionMismatch(format!(
            "pairing uses {} subcarriers, cost matrix has {}",
            pairing.num_subcarriers(),
            costs.num_subcarriers()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> (SparsityPattern, CostMatrix) {
        (
            SparsityPattern::from_rows(&[[1u8, 1], [0, 1]]).unwrap(),
            CostMatrix::from_rows(&[[1.0, 2.0], [4.0, 1.0]]).unwrap(),
        )
    }

    #[test]
    fn worked_instance_objectives() {
        let (s, c) = worked();
        let id = Pairing::new(vec![0, 1], 2).unwrap();
        let obj = objective(&id, &s, &c).unwrap();
        assert_eq!(obj.per_agent, vec![3.0, 1.0]);
        assert_eq!(obj.value, 3.0);

        let swap = Pairing::new(vec![1, 0], 2).unwrap();
        let obj = objective(&swap, &s, &c).unwrap();
        assert_eq!(obj.per_agent, vec![3.0, 4.0]);
        assert_eq!(obj.value, 4.0);
    }

    #[test]
    fn all_sparse_pattern_has_zero_objective() {
        let s = SparsityPattern::from_rows(&[[0u8, 0], [0, 0]]).unwrap();
        let (_, c) = worked();
        let obj = objective(&Pairing::sequential(2, 2).unwrap(), &s, &c).unwrap();
        assert_eq!(obj.value, 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let (s, c) = worked();
        let p = Pairing::sequential(1, 2).unwrap();
        assert!(matches!(objective(&p, &s, &c), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn validation() {
        let id = Pairing::sequential(3, 3).unwrap();
        assert!(validate_pairing(&id.to_matrix()));
        let bad = vec![vec![true, false], vec![true, false]];
        assert!(!validate_pairing(&bad));
        let wide = Pairing::new(vec![4, 0, 2], 5).unwrap();
        assert!(validate_pairing(&wide.to_matrix()));
        assert!(!validate_pairing(&[vec![false, false]]));
        assert!(Pairing::new(vec![0, 0], 2).is_err());
        assert!(Pairing::new(vec![2], 2).is_err());
    }
}
