#![allow(dead_code)]

use airfusion_core::seed::derive;
use airfusion_core::units::dbm_to_watts;
use airfusion_core::{
    cost_matrix, generate_channels, generate_sparsity, ChannelMatrix, CostMatrix, RicianParams, SparsityPattern,
};

/// One random instance with default fading and `N0 = -40 dBm`.
pub struct Drawn {
    pub channels: ChannelMatrix,
    pub pattern: SparsityPattern,
    pub costs: CostMatrix,
}

pub fn draw(k: usize, v: usize, m: usize, density: f64, seed: u64) -> Drawn {
    let channels = generate_channels(k, m, RicianParams::default(), derive(seed, &[1])).unwrap();
    let pattern = generate_sparsity(k, v, density, derive(seed, &[2])).unwrap();
    let costs = cost_matrix(&channels, dbm_to_watts(-40.0)).unwrap();
    Drawn {
        channels,
        pattern,
        costs,
    }
}
