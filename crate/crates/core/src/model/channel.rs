use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::db_to_linear;

/// Complex gains `h[k][m]` from every agent to the fusion center on every subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    num_agents: usize,
    num_subcarriers: usize,
    gains: Vec<Complex64>,
}

impl ChannelMatrix {
    /// Builds a matrix from row-major gains. Every entry must be finite and nonzero.
    pub fn new(num_agents: usize, num_subcarriers: usize, gains: Vec<Complex64>) -> Result<Self> {
        if num_agents == 0 || num_subcarriers == 0 {
            return Err(Error::InvalidDimension(format!(
                "channel matrix must be at least 1x1, got {num_agents}x{num_subcarriers}"
            )));
        }
        if gains.len() != num_agents * num_subcarriers {
            return Err(Error::DimensionMismatch(format!(
                "expected {} gains, got {}",
                num_agents * num_subcarriers,
                gains.len()
            )));
        }
        for (i, h) in gains.iter().enumerate() {
            let p = h.norm_sqr();
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::ZeroChannel {
                    agent: i / num_subcarriers,
                    subcarrier: i % num_subcarriers,
                });
            }
        }
        Ok(Self {
            num_agents,
            num_subcarriers,
            gains,
        })
    }

    /// Unit gain on every link.
    pub fn unit(num_agents: usize, num_subcarriers: usize) -> Result<Self> {
        Self::new(
            num_agents,
            num_subcarriers,
            vec![Complex64::new(1.0, 0.0); num_agents * num_subcarriers],
        )
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    #[inline]
    pub fn gain(&self, agent: usize, subcarrier: usize) -> Complex64 {
        self.gains[agent * self.num_subcarriers + subcarrier]
    }

    /// `|h|^2`
    #[inline]
    pub fn power_gain(&self, agent: usize, subcarrier: usize) -> f64 {
        self.gain(agent, subcarrier).norm_sqr()
    }

    pub fn row(&self, agent: usize) -> &[Complex64] {
        &self.gains[agent * self.num_subcarriers..(agent + 1) * self.num_subcarriers]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.gains
    }

    /// Scales every power gain `|h|^2` by `alpha` (amplitudes by `sqrt(alpha)`).
    pub fn scaled_power(&self, alpha: f64) -> Result<Self> {
        let s = alpha.sqrt();
        Self::new(
            self.num_agents,
            self.num_subcarriers,
            self.gains.iter().map(|h| h * s).collect(),
        )
    }
}

/// Rician fading parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianParams {
    /// Power ratio between the line-of-sight and scattered components, in dB.
    pub los_nlos_ratio_db: f64,
    /// Large-scale path gain in dB (negative for a loss).
    pub path_loss_db: f64,
}

impl Default for RicianParams {
    fn default() -> Self {
        Self {
            los_nlos_ratio_db: 3.0,
            path_loss_db: -15.0,
        }
    }
}

impl RicianParams {
    /// Mean power gain `E|h|^2`.
    pub fn mean_power_gain(&self) -> f64 {
        db_to_linear(self.path_loss_db)
    }
}

/// Draws an i.i.d. Rician `K x M` channel matrix.
///
/// `h = sqrt(g) * (sqrt(kappa/(kappa+1)) e^{j theta} + sqrt(1/(kappa+1)) w)` with
/// `w ~ CN(0, 1)` and `theta` uniform, so that `E|h|^2 = g`.
pub fn generate_channels(
    num_agents: usize,
    num_subcarriers: usize,
    params: RicianParams,
    seed: u64,
) -> Result<ChannelMatrix> {
    if num_agents == 0 || num_subcarriers == 0 {
        return Err(Error::InvalidDimension(format!(
            "channel matrix must be at least 1x1, got {num_agents}x{num_subcarriers}"
        )));
    }
    let kappa = db_to_linear(params.los_nlos_ratio_db);
    let (los, nlos) = if kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        ((kappa / (kappa + 1.0)).sqrt(), (1.0 / (kappa + 1.0)).sqrt())
    };
    let amplitude = params.mean_power_gain().sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scatter = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid std");
    let n = num_agents * num_subcarriers;
    let mut gains = Vec::with_capacity(n);
    for _ in 0..n {
        let theta: f64 = rng.random_range(0.0..2.0 * PI);
        let w = Complex64::new(scatter.sample(&mut rng), scatter.sample(&mut rng));
        let h = (Complex64::from_polar(los, theta) + w * nlos) * amplitude;
        gains.push(h);
    }
    ChannelMatrix::new(num_agents, num_subcarriers, gains)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_gain() {
        let gains = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let err = ChannelMatrix::new(1, 2, gains).unwrap_err();
        assert!(matches!(
            err,
            Error::ZeroChannel {
                agent: 0,
                subcarrier: 1
            }
        ));
    }

    #[test]
    fn rejects_empty_dimensions() {
        assert!(generate_channels(0, 4, RicianParams::default(), 1).is_err());
        assert!(generate_channels(4, 0, RicianParams::default(), 1).is_err());
    }

    #[test]
    fn second_moment_matches_path_loss() {
        // 4 x 25_000 = 10^5 draws.
        let h = generate_channels(4, 25_000, RicianParams::default(), 11).unwrap();
        let n = h.as_slice().len() as f64;
        let powers: Vec<f64> = h.as_slice().iter().map(|g| g.norm_sqr()).collect();
        let mean = powers.iter().sum::<f64>() / n;
        let var = powers.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let target = 10f64.powf(-1.5);
        assert!((mean - target).abs() / target < 0.02, "mean {mean} vs {target}");
        let se = (var / n).sqrt();
        assert!(
            (mean - target).abs() < 3.0 * se,
            "mean {mean} off by more than 3 se ({se})"
        );
    }

    #[test]
    fn pure_line_of_sight_has_unit_magnitude() {
        let p = RicianParams {
            los_nlos_ratio_db: 200.0,
            path_loss_db: 0.0,
        };
        let h = generate_channels(1, 1, p, 5).unwrap();
        assert!((h.gain(0, 0).norm() - 1.0).abs() < 1e-9);

        let p = RicianParams {
            los_nlos_ratio_db: f64::INFINITY,
            path_loss_db: 0.0,
        };
        let h = generate_channels(3, 3, p, 5).unwrap();
        for g in h.as_slice() {
            assert!((g.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = generate_channels(4, 26, RicianParams::default(), 99).unwrap();
        let b = generate_channels(4, 26, RicianParams::default(), 99).unwrap();
        assert_eq!(a, b);
        let c = generate_channels(4, 26, RicianParams::default(), 100).unwrap();
        assert_ne!(a, c);
    }
}
