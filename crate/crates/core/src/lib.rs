//! Voxel-carrier pairing and power allocation for over-the-air feature fusion.
//!
//! Agents observe a sparse voxel grid and upload per-voxel features
//! simultaneously over OFDM subcarriers; the fusion center receives their
//! superposition. This crate decides which subcarrier carries which voxel and
//! at what receive SNR so as to maximise the worst voxel SNR, and simulates
//! the resulting fusion error against several baselines.
//!
//! * [`model`]: channels, sparsity patterns, cost matrix, homogeneous partition.
//! * [`pairing`] / [`power`]: the max-linear objective and closed-form power.
//! * [`greedy`]: fast heuristic pairing.
//! * [`optimal`]: exact compact-tree branch and bound.
//! * [`oracle`]: brute-force references for testing.
//! * [`sim`]: protocol simulation, baselines and latency models.
//! * [`harness`]: seeded experiments, sweeps and reports.

pub mod error;
pub mod greedy;
pub mod harness;
pub mod instance;
pub mod model;
pub mod optimal;
pub mod oracle;
pub mod pairing;
pub mod power;
pub mod seed;
pub mod sim;
pub mod units;

pub use error::{Error, Result};
pub use greedy::{greedy_pairing, greedy_voca_ppa, voxel_priority_order};
pub use model::{
    augment_dummy_voxels, cost_matrix, generate_channels, generate_sparsity, homogeneous_partition, ChannelMatrix,
    CostMatrix, HomogeneousPartition, RicianParams, SparsityPattern,
};
pub use optimal::{
    dfs_optimal, dfs_optimal_with, optimal_pairing, optimal_pairing_with, optimal_voca_ppa, OptimalSolution,
    SolverOptions, SolverStats,
};
pub use pairing::{objective, validate_pairing, Objective, Pairing};
pub use power::{optimal_receive_snr, transmit_powers, Allocation};
