use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Maximum number of agents; voxel signatures are packed into a `u64`.
pub const MAX_AGENTS: usize = 64;

/// Binary `K x V` occupancy matrix: `S[k][v] = 1` iff agent `k` has a nonzero
/// feature vector for voxel `v`.
///
/// Trailing dummy voxels (all-zero columns appended to pad `V` up to `M`) are
/// counted by [`SparsityPattern::num_dummy`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsityPattern {
    num_agents: usize,
    num_voxels: usize,
    num_dummy: usize,
    entries: Vec<bool>,
}

impl SparsityPattern {
    pub fn new(num_agents: usize, num_voxels: usize, entries: Vec<bool>) -> Result<Self> {
        if num_agents == 0 || num_agents > MAX_AGENTS {
            return Err(Error::InvalidDimension(format!(
                "number of agents must be in 1..={MAX_AGENTS}, got {num_agents}"
            )));
        }
        if entries.len() != num_agents * num_voxels {
            return Err(Error::DimensionMismatch(format!(
                "expected {} sparsity entries, got {}",
                num_agents * num_voxels,
                entries.len()
            )));
        }
        Ok(Self {
            num_agents,
            num_voxels,
            num_dummy: 0,
            entries,
        })
    }

    /// Builds a pattern from 0/1 rows, one row per agent.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let k = rows.len();
        let v = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(k * v);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != v {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {v}",
                    row.len()
                )));
            }
            for &x in row {
                match x {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "sparsity entries must be 0 or 1, got {x}"
                        )))
                    }
                }
            }
        }
        Self::new(k, v, entries)
    }

    pub fn all_ones(num_agents: usize, num_voxels: usize) -> Result<Self> {
        Self::new(num_agents, num_voxels, vec![true; num_agents * num_voxels])
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    /// Total columns, dummy voxels included.
    pub fn num_voxels(&self) -> usize {
        self.num_voxels
    }

    pub fn num_dummy(&self) -> usize {
        self.num_dummy
    }

    pub fn num_real_voxels(&self) -> usize {
        self.num_voxels - self.num_dummy
    }

    pub fn is_dummy(&self, voxel: usize) -> bool {
        voxel >= self.num_real_voxels()
    }

    #[inline]
    pub fn get(&self, agent: usize, voxel: usize) -> bool {
        self.entries[agent * self.num_voxels + voxel]
    }

    /// Column of `S` packed as a bitmask with bit `k` set iff `S[k][voxel] = 1`.
    pub fn signature(&self, voxel: usize) -> u64 {
        (0..self.num_agents)
            .filter(|&k| self.get(k, voxel))
            .fold(0u64, |acc, k| acc | (1 << k))
    }

    /// Number of agents participating in a voxel.
    pub fn column_sum(&self, voxel: usize) -> usize {
        (0..self.num_agents).filter(|&k| self.get(k, voxel)).count()
    }

    /// `|V_k|`, the number of voxels agent `k` is nonsparse on.
    pub fn row_sum(&self, agent: usize) -> usize {
        self.entries[agent * self.num_voxels..(agent + 1) * self.num_voxels]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    /// Fraction of ones over the non-dummy columns.
    pub fn density(&self) -> f64 {
        let real = self.num_real_voxels();
        if real == 0 {
            return 0.0;
        }
        let ones: usize = (0..self.num_agents)
            .map(|k| (0..real).filter(|&v| self.get(k, v)).count())
            .sum();
        ones as f64 / (self.num_agents * real) as f64
    }

    /// Number of voxels on which at least one agent is nonsparse.
    pub fn num_nonsparse_voxels(&self) -> usize {
        (0..self.num_voxels).filter(|&v| self.signature(v) != 0).count()
    }

    /// Copy with agents reordered: row `i` of the result is row `order[i]` of `self`.
    pub fn permute_agents(&self, order: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for &k in order {
            entries.extend_from_slice(&self.entries[k * self.num_voxels..(k + 1) * self.num_voxels]);
        }
        Self {
            entries,
            ..self.clone()
        }
    }
}

/// Draws i.i.d. Bernoulli(`p_nonzero`) entries, resampling any all-zero column
/// until at least one agent observes the voxel.
///
/// Conditioned on rejection each entry is one with probability
/// `p / (1 - (1 - p)^K)`.
pub fn generate_sparsity(num_agents: usize, num_voxels: usize, p_nonzero: f64, seed: u64) -> Result<SparsityPattern> {
    if !(p_nonzero > 0.0 && p_nonzero <= 1.0) {
        return Err(Error::InvalidProbability(p_nonzero));
    }
    if num_agents == 0 || num_agents > MAX_AGENTS {
        return Err(Error::InvalidDimension(format!(
            "number of agents must be in 1..={MAX_AGENTS}, got {num_agents}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = vec![false; num_agents * num_voxels];
    let mut column = vec![false; num_agents];
    for v in 0..num_voxels {
        loop {
            for bit in column.iter_mut() {
                *bit = rng.random_bool(p_nonzero);
            }
            if column.iter().any(|&b| b) {
                break;
            }
        }
        for (k, &bit) in column.iter().enumerate() {
            entries[k * num_voxels + v] = bit;
        }
    }
    SparsityPattern::new(num_agents, num_voxels, entries)
}

/// Expected entry density after the all-zero-column rejection.
pub fn conditional_density(num_agents: usize, p_nonzero: f64) -> f64 {
    p_nonzero / (1.0 - (1.0 - p_nonzero).powi(num_agents as i32))
}

/// Pads `S` with `M - V` all-zero dummy columns so that voxels and subcarriers
/// can be matched one-to-one.
pub fn augment_dummy_voxels(pattern: &SparsityPattern, num_subcarriers: usize) -> Result<SparsityPattern> {
    let v = pattern.num_voxels;
    if num_subcarriers < v {
        return Err(Error::InvalidDimension(format!(
            "need at least as many subcarriers as voxels (M = {num_subcarriers}, V = {v})"
        )));
    }
    let pad = num_subcarriers - v;
    let mut entries = Vec::with_capacity(pattern.num_agents * num_subcarriers);
    for k in 0..pattern.num_agents {
        entries.extend_from_slice(&pattern.entries[k * v..(k + 1) * v]);
        entries.extend(std::iter::repeat_n(false, pad));
    }
    Ok(SparsityPattern {
        num_agents: pattern.num_agents,
        num_voxels: num_subcarriers,
        num_dummy: pattern.num_dummy + pad,
        entries,
    })
}
