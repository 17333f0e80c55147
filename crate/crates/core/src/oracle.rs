//! Brute-force references for small instances. Deliberately naive: they share
//! nothing with the tree search beyond the objective evaluation.

use crate::error::{Error, Result};
use crate::model::{homogeneous_partition, CostMatrix, SparsityPattern};
use crate::optimal::compact_space_size;
use crate::pairing::{objective, Pairing};
use num_bigint::BigUint;

pub const MAX_PERMUTATION_SIZE: usize = 8;
pub const MAX_COMPACT_SIZE: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_objective: f64,
    pub best_pairing: Pairing,
    pub enumerated: u64,
}

fn square_dims(pattern: &SparsityPattern, costs: &CostMatrix) -> Result<usize> {
    let v = pattern.num_voxels();
    if costs.num_subcarriers() != v {
        return Err(Error::DimensionMismatch(format!(
            "oracles need M = V, got V = {v}, M = {}",
            costs.num_subcarriers()
        )));
    }
    Ok(v)
}

/// Evaluates every bijection voxel -> subcarrier. Ties resolve to the
/// lexicographically smallest assignment.
pub fn brute_force_permutations(pattern: &SparsityPattern, costs: &CostMatrix) -> Result<OracleResult> {
    let n = square_dims(pattern, costs)?;
    if n > MAX_PERMUTATION_SIZE {
        return Err(Error::GuardExceeded(format!(
            "{n}! permutations (limit M = V <= {MAX_PERMUTATION_SIZE})"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        let p = Pairing::new(perm.clone(), n)?;
        let f = objective(&p, pattern, costs)?.value;
        if best.as_ref().is_none_or(|b| f < b.0) {
            best = Some((f, perm.clone()));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (best_objective, assignment) = best.expect("at least one permutation");
    Ok(OracleResult {
        best_objective,
        best_pairing: Pairing::new(assignment, n)?,
        enumerated,
    })
}

/// Lexicographic successor; `false` once the last permutation is reached.
fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Evaluates every assignment of subcarrier subsets to homogeneous voxel subsets.
pub fn brute_force_compact(pattern: &SparsityPattern, costs: &CostMatrix) -> Result<OracleResult> {
    let n = square_dims(pattern, costs)?;
    let partition = homogeneous_partition(pattern);
    let size = compact_space_size(&partition.group_sizes());
    if size > BigUint::from(MAX_COMPACT_SIZE) {
        return Err(Error::GuardExceeded(format!(
            "compact space has {size} mappings (limit {MAX_COMPACT_SIZE})"
        )));
    }
    let groups: Vec<&[usize]> = partition.groups().iter().map(|g| g.voxels.as_slice()).collect();
    let mut search = CompactSearch {
        pattern,
        costs,
        groups: &groups,
        n,
        assignment: vec![usize::MAX; n],
        used: vec![false; n],
        best: None,
        enumerated: 0,
    };
    search.assign_group(0)?;
    let (best_objective, assignment) = search.best.expect("at least one mapping");
    Ok(OracleResult {
        best_objective,
        best_pairing: Pairing::new(assignment, n)?,
        enumerated: search.enumerated,
    })
}

struct CompactSearch<'a> {
    pattern: &'a SparsityPattern,
    costs: &'a CostMatrix,
    groups: &'a [&'a [usize]],
    n: usize,
    assignment: Vec<usize>,
    used: Vec<bool>,
    best: Option<(f64, Vec<usize>)>,
    enumerated: u64,
}

impl CompactSearch<'_> {
    fn assign_group(&mut self, g: usize) -> Result<()> {
        if g == self.groups.len() {
            self.enumerated += 1;
            let p = Pairing::new(self.assignment.clone(), self.n)?;
            let f = objective(&p, self.pattern, self.costs)?.value;
            if self.best.as_ref().is_none_or(|b| f < b.0) {
                self.best = Some((f, self.assignment.clone()));
            }
            return Ok(());
        }
        self.choose(g, 0, 0)
    }

    /// Picks subcarriers (ascending, from `start`) for the `slot`-th voxel of group `g`.
    fn choose(&mut self, g: usize, slot: usize, start: usize) -> Result<()> {
        let voxels = self.groups[g];
        if slot == voxels.len() {
            return self.assign_group(g + 1);
        }
        for m in start..self.n {
            if self.used[m] {
                continue;
            }
            self.used[m] = true;
            self.assignment[voxels[slot]] = m;
            self.choose(g, slot + 1, m + 1)?;
            self.used[m] = false;
        }
        Ok(())
    }
}
