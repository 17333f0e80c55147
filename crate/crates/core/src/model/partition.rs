use std::collections::BTreeMap;

use super::sparsity::SparsityPattern;

/// Voxels sharing one sparsity column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousGroup {
    /// Bit `k` set iff every voxel in the group is nonsparse on agent `k`.
    pub signature: u64,
    /// Ascending voxel indices.
    pub voxels: Vec<usize>,
}

impl HomogeneousGroup {
    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }
}

/// Grouping of voxels by identical sparsity column.
///
/// Groups are ordered by descending size, ties broken by ascending signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousPartition {
    groups: Vec<HomogeneousGroup>,
}

impl HomogeneousPartition {
    pub fn groups(&self) -> &[HomogeneousGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn num_voxels(&self) -> usize {
        self.groups.iter().map(HomogeneousGroup::len).sum()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(HomogeneousGroup::len).collect()
    }

    /// Heterogeneity entropy in nats: `-sum_q (|H_q|/V) ln(|H_q|/V)`.
    pub fn entropy(&self) -> f64 {
        heterogeneity_entropy(&self.group_sizes())
    }
}

pub fn homogeneous_partition(pattern: &SparsityPattern) -> HomogeneousPartition {
    let mut by_signature: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for v in 0..pattern.num_voxels() {
        by_signature.entry(pattern.signature(v)).or_default().push(v);
    }
    let mut groups: Vec<HomogeneousGroup> = by_signature
        .into_iter()
        .map(|(signature, voxels)| HomogeneousGroup { signature, voxels })
        .collect();
    // Stable sort keeps ascending signature among equal sizes.
    groups.sort_by_key(|g| std::cmp::Reverse(g.len()));
    HomogeneousPartition { groups }
}

/// Entropy (nats) of the empirical distribution of voxels over groups of the given sizes.
pub fn heterogeneity_entropy(group_sizes: &[usize]) -> f64 {
    let total: usize = group_sizes.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let h: f64 = group_sizes
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let p = n as f64 / total;
            -p * p.ln()
        })
        .sum();
    // -1 * 1 * ln(1) is -0.0
    h.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_sparsity;

    #[test]
    fn distinct_columns_form_singletons() {
        let s = SparsityPattern::from_rows(&[[1u8, 1], [0, 1]]).unwrap();
        let p = homogeneous_partition(&s);
        assert_eq!(p.len(), 2);
        assert_eq!(p.groups()[0].signature, 0b01);
        assert_eq!(p.groups()[0].voxels, vec![0]);
        assert_eq!(p.groups()[1].signature, 0b11);
        assert_eq!(p.groups()[1].voxels, vec![1]);
    }

    #[test]
    fn identical_columns_form_one_group() {
        let s = SparsityPattern::from_rows(&[[1u8, 1, 1, 1], [0, 0, 0, 0], [1, 1, 1, 1]]).unwrap();
        let p = homogeneous_partition(&s);
        assert_eq!(p.len(), 1);
        assert_eq!(p.groups()[0].voxels, vec![0, 1, 2, 3]);
        assert_eq!(p.entropy(), 0.0);
    }

    #[test]
    fn group_count_matches_sorted_dedup() {
        for seed in 0..50 {
            let s = generate_sparsity(4, 26, 1.0 / 3.0, seed).unwrap();
            let mut cols: Vec<Vec<bool>> = (0..26).map(|v| (0..4).map(|k| s.get(k, v)).collect()).collect();
            cols.sort();
            cols.dedup();
            let p = homogeneous_partition(&s);
            assert_eq!(p.len(), cols.len());
            assert_eq!(p.num_voxels(), 26);
            // canonical order
            for w in p.groups().windows(2) {
                assert!(w[0].len() > w[1].len() || (w[0].len() == w[1].len() && w[0].signature < w[1].signature));
            }
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(heterogeneity_entropy(&[7]), 0.0);
        assert!((heterogeneity_entropy(&[1; 9]) - 9f64.ln()).abs() < 1e-12);
        assert!((heterogeneity_entropy(&[2, 2]) - std::f64::consts::LN_2).abs() < 1e-12);
    }
}
