//! Over-the-air fusion round simulation, baseline allocations and latency models.

mod baselines;
mod fusion;
mod latency;

pub use baselines::{naive_allocation, vanilla_allocation};
pub use fusion::{fuse_ground_truth, generate_features, simulate_round, FeatureTensor, FusionMode, FusionResult};
pub use latency::{airfusion_latency, digital_latency, LatencyModel, LatencyReport};
