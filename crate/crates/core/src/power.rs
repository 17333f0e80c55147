//! Closed-form optimal power allocation for a fixed pairing.
//!
//! Given a pairing, the max-min receive SNR is attained by giving every voxel
//! the same SNR `gamma* = P_max / F`, where `F` is the largest per-agent
//! channel-inversion cost. The agent attaining `F` spends its whole budget.

use crate::error::{Error, Result};
use crate::model::{cost_matrix, ChannelMatrix, SparsityPattern};
use crate::pairing::{objective, Pairing};

/// `gamma* = P_max / F`. Returns `f64::INFINITY` when `F = 0`, i.e. no agent
/// transmits and the SNR is unconstrained.
pub fn optimal_receive_snr(objective_value: f64, p_max: f64) -> f64 {
    if objective_value == 0.0 {
        f64::INFINITY
    } else {
        p_max / objective_value
    }
}

/// `|p[k][m]|^2 = N0 * gamma / |h[k][m]|^2` on subcarriers carrying a voxel
/// agent `k` participates in; zero elsewhere. Row-major `K x M`.
pub fn transmit_powers(
    pairing: &Pairing,
    participation: &SparsityPattern,
    channels: &ChannelMatrix,
    receive_snr: f64,
    noise_power: f64,
) -> Result<Vec<f64>> {
    if !receive_snr.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "transmit powers need a finite receive SNR, got {receive_snr}"
        )));
    }
    let k_agents = channels.num_agents();
    let m_sub = channels.num_subcarriers();
    if participation.num_agents() != k_agents || pairing.num_subcarriers() != m_sub {
        return Err(Error::DimensionMismatch("pairing/pattern/channels disagree".into()));
    }
    if pairing.num_voxels() != participation.num_voxels() {
        return Err(Error::DimensionMismatch("pairing/pattern voxel counts disagree".into()));
    }
    let mut power = vec![0.0; k_agents * m_sub];
    if receive_snr == 0.0 {
        return Ok(power);
    }
    for (v, &m) in pairing.assignment().iter().enumerate() {
        for k in 0..k_agents {
            if participation.get(k, v) {
                let g = channels.power_gain(k, m);
                if g == 0.0 {
                    return Err(Error::ZeroChannel {
                        agent: k,
                        subcarrier: m,
                    });
                }
                power[k * m_sub + m] = noise_power * receive_snr / g;
            }
        }
    }
    Ok(power)
}

/// A pairing together with its common receive SNR and per-link transmit powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub pairing: Pairing,
    /// Which agents transmit on which voxel. Equal to `S` for sparsity-aware
    /// schemes and all-ones for naive over-the-air computation.
    pub participation: SparsityPattern,
    /// Common receive SNR `gamma*` (linear). Infinite when nothing is transmitted.
    pub receive_snr: f64,
    /// `F`, the largest per-agent cost of the pairing.
    pub objective: f64,
    /// Row-major `K x M` matrix of `|p[k][m]|^2` in watts.
    pub tx_power: Vec<f64>,
    num_subcarriers: usize,
}

impl Allocation {
    /// Applies the equal-SNR power allocation to a pairing.
    pub fn with_optimal_power(
        pairing: Pairing,
        participation: SparsityPattern,
        channels: &ChannelMatrix,
        p_max: f64,
        noise_power: f64,
    ) -> Result<Self> {
        if !(p_max.is_finite() && p_max > 0.0) {
            return Err(Error::InvalidParameter(format!("P_max must be positive, got {p_max}")));
        }
        let costs = cost_matrix(channels, noise_power)?;
        let obj = objective(&pairing, &participation, &costs)?;
        let receive_snr = optimal_receive_snr(obj.value, p_max);
        let tx_power = if receive_snr.is_finite() {
            transmit_powers(&pairing, &participation, channels, receive_snr, noise_power)?
        } else {
            vec![0.0; channels.num_agents() * channels.num_subcarriers()]
        };
        Ok(Self {
            pairing,
            participation,
            receive_snr,
            objective: obj.value,
            tx_power,
            num_subcarriers: channels.num_subcarriers(),
        })
    }

    pub fn is_unconstrained(&self) -> bool {
        self.receive_snr.is_infinite()
    }

    pub fn agent_power(&self, agent: usize) -> f64 {
        self.tx_power[agent * self.num_subcarriers..(agent + 1) * self.num_subcarriers]
            .iter()
            .sum()
    }

    pub fn power(&self, agent: usize, subcarrier: usize) -> f64 {
        self.tx_power[agent * self.num_subcarriers + subcarrier]
    }

    /// Receive SNR of every voxel.
    pub fn voxel_snr(&self) -> Vec<f64> {
        vec![self.receive_snr; self.pairing.num_voxels()]
    }
}
