use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, SparsityPattern};
use crate::pairing::Pairing;
use crate::power::Allocation;

/// Sparsity-unaware over-the-air computation: voxel `v` on subcarrier `v`,
/// every agent transmits on every voxel, one SNR that fits every budget.
pub fn naive_allocation(
    channels: &ChannelMatrix,
    p_max: f64,
    noise_power: f64,
    num_voxels: usize,
) -> Result<Allocation> {
    let pairing = sequential(num_voxels, channels.num_subcarriers())?;
    let everyone = SparsityPattern::all_ones(channels.num_agents(), num_voxels)?;
    Allocation::with_optimal_power(pairing, everyone, channels, p_max, noise_power)
}

/// Sparsity-aware transmission with sequential pairing and equal-SNR power.
pub fn vanilla_allocation(
    pattern: &SparsityPattern,
    channels: &ChannelMatrix,
    p_max: f64,
    noise_power: f64,
) -> Result<Allocation> {
    let pairing = sequential(pattern.num_voxels(), channels.num_subcarriers())?;
    Allocation::with_optimal_power(pairing, pattern.clone(), channels, p_max, noise_power)
}

fn sequential(num_voxels: usize, num_subcarriers: usize) -> Result<Pairing> {
    if num_voxels > num_subcarriers {
        return Err(Error::InvalidDimension(format!(
            "need at least as many subcarriers as voxels (M = {num_subcarriers}, V = {num_voxels})"
        )));
    }
    Pairing::sequential(num_voxels, num_subcarriers)
}
