use super::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Channel-inversion cost `c[k][m] = N0 / |h[k][m]|^2`: transmit power agent
/// `k` spends on subcarrier `m` per unit of receive SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    num_agents: usize,
    num_subcarriers: usize,
    noise_power: f64,
    costs: Vec<f64>,
}

impl CostMatrix {
    /// Wraps raw costs directly. Entries must be finite and positive.
    pub fn from_costs(num_agents: usize, num_subcarriers: usize, noise_power: f64, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != num_agents * num_subcarriers {
            return Err(Error::DimensionMismatch(format!(
                "expected {} costs, got {}",
                num_agents * num_subcarriers,
                costs.len()
            )));
        }
        if let Some(i) = costs.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::ZeroChannel {
                agent: i / num_subcarriers,
                subcarrier: i % num_subcarriers,
            });
        }
        Ok(Self {
            num_agents,
            num_subcarriers,
            noise_power,
            costs,
        })
    }

    /// Builds a unit-noise cost matrix from rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let k = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut costs = Vec::with_capacity(k * m);
        for r in rows {
            if r.as_ref().len() != m {
                return Err(Error::DimensionMismatch("ragged cost rows".into()));
            }
            costs.extend_from_slice(r.as_ref());
        }
        Self::from_costs(k, m, 1.0, costs)
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    #[inline]
    pub fn get(&self, agent: usize, subcarrier: usize) -> f64 {
        self.costs[agent * self.num_subcarriers + subcarrier]
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.costs[agent * self.num_subcarriers..(agent + 1) * self.num_subcarriers]
    }

    /// Copy with agents reordered: row `i` of the result is row `order[i]` of `self`.
    pub fn permute_agents(&self, order: &[usize]) -> Self {
        let mut costs = Vec::with_capacity(self.costs.len());
        for &k in order {
            costs.extend_from_slice(self.row(k));
        }
        Self { costs, ..self.clone() }
    }
}

pub fn cost_matrix(channels: &ChannelMatrix, noise_power: f64) -> Result<CostMatrix> {
    if !(noise_power.is_finite() && noise_power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be positive, got {noise_power}"
        )));
    }
    let k = channels.num_agents();
    let m = channels.num_subcarriers();
    let mut costs = Vec::with_capacity(k * m);
    for a in 0..k {
        for s in 0..m {
            let g = channels.power_gain(a, s);
            if g == 0.0 {
                return Err(Error::ZeroChannel {
                    agent: a,
                    subcarrier: s,
                });
            }
            costs.push(noise_power / g);
        }
    }
    CostMatrix::from_costs(k, m, noise_power, costs)
}
