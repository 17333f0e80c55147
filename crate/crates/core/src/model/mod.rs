//! Domain types and random instance generation.

mod channel;
mod cost;
mod partition;
mod sparsity;

pub use channel::{generate_channels, ChannelMatrix, RicianParams};
pub use cost::{cost_matrix, CostMatrix};
pub use partition::{heterogeneity_entropy, homogeneous_partition, HomogeneousGroup, HomogeneousPartition};
pub use sparsity::{augment_dummy_voxels, conditional_density, generate_sparsity, SparsityPattern, MAX_AGENTS};
