use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, SparsityPattern};

/// How long an over-the-air round takes for `N_v` voxels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LatencyModel {
    /// `M` voxels ride in parallel, one per subcarrier: `ceil(N_v / M) * L / B_sub`.
    #[default]
    Parallel,
    /// One voxel at a time: `L * N_v / B_sub`.
    Literal,
}

impl fmt::Display for LatencyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Parallel => "parallel",
            Self::Literal => "literal",
        })
    }
}

impl FromStr for LatencyModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parallel" => Ok(Self::Parallel),
            "literal" => Ok(Self::Literal),
            other => Err(Error::InvalidParameter(format!(
                "unknown latency model `{other}` (expected parallel or literal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyReport {
    pub airfusion_seconds: f64,
    pub digital_seconds: f64,
    pub quantization_bits: u32,
}

/// Seconds to upload `num_voxels` non-sparse voxels of dimension `dim`.
pub fn airfusion_latency(
    num_voxels: usize,
    dim: usize,
    b_sub_hz: f64,
    num_subcarriers: usize,
    model: LatencyModel,
) -> f64 {
    let symbols = match model {
        LatencyModel::Parallel => num_voxels.div_ceil(num_subcarriers.max(1)) * dim,
        LatencyModel::Literal => num_voxels * dim,
    };
    symbols as f64 / b_sub_hz
}

/// Orthogonal digital upload: every agent quantises its observed features to
/// `bits` bits per coefficient and sends them on its own subcarriers.
///
/// Each agent with data first takes its strongest free subcarrier. Then the
/// agent furthest behind (largest payload over current rate) repeatedly takes
/// its strongest free subcarrier, as long as that raises its rate under an
/// equal split of `P_max`. Latency is the slowest agent's payload over rate.
#[allow(clippy::too_many_arguments)]
pub fn digital_latency(
    pattern: &SparsityPattern,
    channels: &ChannelMatrix,
    p_max: f64,
    noise_power: f64,
    bits: u32,
    dim: usize,
    b_sub_hz: f64,
) -> Result<f64> {
    if !(2..=5).contains(&bits) {
        return Err(Error::InvalidParameter(format!(
            "quantisation bits must be in 2..=5, got {bits}"
        )));
    }
    let (k, m) = (channels.num_agents(), channels.num_subcarriers());
    if pattern.num_agents() != k {
        return Err(Error::DimensionMismatch("pattern and channels disagree on K".into()));
    }
    let payload: Vec<f64> = (0..k)
        .map(|a| (bits as usize * dim * pattern.row_sum(a)) as f64)
        .collect();
    let active: Vec<usize> = (0..k).filter(|&a| payload[a] > 0.0).collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    if active.len() > m {
        return Err(Error::InvalidDimension(format!(
            "{} agents with data but only {m} subcarriers",
            active.len()
        )));
    }
    let snr = |a: usize, s: usize| p_max * channels.power_gain(a, s) / noise_power;
    let rate = |a: usize, subs: &[usize]| -> f64 {
        let share = 1.0 / subs.len() as f64;
        subs.iter().map(|&s| b_sub_hz * (1.0 + share * snr(a, s)).log2()).sum()
    };
    let mut free = vec![true; m];
    let strongest_free = |a: usize, free: &[bool]| -> Option<usize> {
        (0..m).filter(|&s| free[s]).max_by(|&x, &y| {
            channels
                .power_gain(a, x)
                .total_cmp(&channels.power_gain(a, y))
                .then(y.cmp(&x))
        })
    };
    let mut owned: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut first = active.clone();
    first.sort_by(|&x, &y| payload[y].total_cmp(&payload[x]).then(x.cmp(&y)));
    for &a in &first {
        let s = strongest_free(a, &free).expect("at least as many subcarriers as active agents");
        free[s] = false;
        owned[a].push(s);
    }
    let mut open = active.clone();
    while !open.is_empty() {
        let (i, &a) = open
            .iter()
            .enumerate()
            .max_by(|&(_, &x), &(_, &y)| {
                (payload[x] / rate(x, &owned[x]))
                    .total_cmp(&(payload[y] / rate(y, &owned[y])))
                    .then(y.cmp(&x))
            })
            .expect("open is nonempty");
        let Some(s) = strongest_free(a, &free) else { break };
        let before = rate(a, &owned[a]);
        owned[a].push(s);
        if rate(a, &owned[a]) > before {
            free[s] = false;
        } else {
            owned[a].pop();
            open.swap_remove(i);
        }
    }
    Ok(active
        .iter()
        .map(|&a| payload[a] / rate(a, &owned[a]))
        .fold(0.0, f64::max))
}
