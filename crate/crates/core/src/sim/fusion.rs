use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, SparsityPattern};
use crate::power::Allocation;

/// Per-agent voxel features, `K x V x L`, zero wherever the agent observes nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    num_agents: usize,
    num_voxels: usize,
    dim: usize,
    values: Vec<f64>,
}

impl FeatureTensor {
    /// Checks that `values` is `K x V x L` and vanishes outside `pattern`.
    pub fn new(pattern: &SparsityPattern, dim: usize, values: Vec<f64>) -> Result<Self> {
        let (k, v) = (pattern.num_agents(), pattern.num_voxels());
        if dim == 0 {
            return Err(Error::InvalidDimension("feature dimension must be positive".into()));
        }
        if values.len() != k * v * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {k}x{v}x{dim} = {} feature values, got {}",
                k * v * dim,
                values.len()
            )));
        }
        for a in 0..k {
            for x in 0..v {
                if !pattern.get(a, x)
                    && values[(a * v + x) * dim..(a * v + x + 1) * dim]
                        .iter()
                        .any(|&f| f != 0.0)
                {
                    return Err(Error::InvalidParameter(format!(
                        "agent {a} has a nonzero feature on voxel {x} it does not observe"
                    )));
                }
            }
        }
        Ok(Self {
            num_agents: k,
            num_voxels: v,
            dim,
            values,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn num_voxels(&self) -> usize {
        self.num_voxels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature(&self, agent: usize, voxel: usize) -> &[f64] {
        let start = (agent * self.num_voxels + voxel) * self.dim;
        &self.values[start..start + self.dim]
    }
}

/// Standard normal features on every observed (agent, voxel) entry.
pub fn generate_features(pattern: &SparsityPattern, dim: usize, seed: u64) -> Result<FeatureTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, v) = (pattern.num_agents(), pattern.num_voxels());
    let mut values = vec![0.0; k * v * dim];
    for a in 0..k {
        for x in 0..v {
            if pattern.get(a, x) {
                for f in &mut values[(a * v + x) * dim..(a * v + x + 1) * dim] {
                    *f = rng.sample(StandardNormal);
                }
            }
        }
    }
    FeatureTensor::new(pattern, dim, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionMode {
    Average,
    Max,
}

/// Fused feature map `V x L`. Averaging divides by `K`, counting agents that
/// observe nothing as zeros.
pub fn fuse_ground_truth(features: &FeatureTensor, mode: FusionMode) -> Vec<f64> {
    let (k, v, l) = (features.num_agents, features.num_voxels, features.dim);
    let mut out = vec![
        match mode {
            FusionMode::Average => 0.0,
            FusionMode::Max => f64::NEG_INFINITY,
        };
        v * l
    ];
    for a in 0..k {
        for x in 0..v {
            for (o, &f) in out[x * l..(x + 1) * l].iter_mut().zip(features.feature(a, x)) {
                match mode {
                    FusionMode::Average => *o += f,
                    FusionMode::Max => *o = o.max(f),
                }
            }
        }
    }
    if mode == FusionMode::Average {
        out.iter_mut().for_each(|o| *o /= k as f64);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    /// `V x L`.
    pub ground_truth: Vec<f64>,
    /// `V x L`.
    pub estimate: Vec<f64>,
    pub mse: f64,
    pub per_voxel_mse: Vec<f64>,
}

/// One average-pooling fusion round. Every participating agent normalises its
/// features with `(mu, sigma)`, precodes by channel inversion at the
/// allocation's power, and all signals superpose with `CN(0, N0)` noise on the
/// voxel's subcarrier; the receiver rescales, restores the mean and averages.
pub fn simulate_round(
    features: &FeatureTensor,
    allocation: &Allocation,
    channels: &ChannelMatrix,
    noise_power: f64,
    mu: f64,
    sigma: f64,
    seed: u64,
) -> Result<FusionResult> {
    let (k, v, l) = (features.num_agents, features.num_voxels, features.dim);
    let part = &allocation.participation;
    if part.num_agents() != k || part.num_voxels() != v || channels.num_agents() != k {
        return Err(Error::DimensionMismatch(
            "features, allocation and channels disagree".into(),
        ));
    }
    if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need finite mu and positive sigma, got ({mu}, {sigma})"
        )));
    }
    let gamma = allocation.receive_snr;
    let amplitude = (noise_power * gamma).sqrt();
    let noise_sd = (noise_power / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let ground_truth = fuse_ground_truth(features, FusionMode::Average);
    let mut estimate = vec![0.0; v * l];
    let mut per_voxel_mse = vec![0.0; v];
    for (x, voxel_mse) in per_voxel_mse.iter_mut().enumerate() {
        let m = allocation.pairing.subcarrier(x);
        let senders: Vec<usize> = (0..k).filter(|&a| part.get(a, x)).collect();
        let gains: Vec<Complex64> = senders
            .iter()
            .map(|&a| {
                let h = channels.gain(a, m);
                let p = allocation.power(a, m).sqrt() * h.conj() / h.norm();
                h * p
            })
            .collect();
        let mean_term = mu * senders.len() as f64;
        for i in 0..l {
            let mut y = Complex64::new(0.0, 0.0);
            for (&a, &g) in senders.iter().zip(&gains) {
                y += g * ((features.feature(a, x)[i] - mu) / sigma);
            }
            let g_hat = if gamma.is_finite() {
                y += Complex64::new(
                    noise_sd * rng.sample::<f64, _>(StandardNormal),
                    noise_sd * rng.sample::<f64, _>(StandardNormal),
                );
                (sigma * y.re / amplitude + mean_term) / k as f64
            } else {
                // Nothing is transmitted and nothing needs to be.
                (sigma * y.re + mean_term) / k as f64
            };
            let idx = x * l + i;
            estimate[idx] = g_hat;
            *voxel_mse += (g_hat - ground_truth[idx]).powi(2);
        }
        *voxel_mse /= l as f64;
    }
    let mse = per_voxel_mse.iter().sum::<f64>() / v.max(1) as f64;
    Ok(FusionResult {
        ground_truth,
        estimate,
        mse,
        per_voxel_mse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_channels, generate_sparsity, RicianParams};
    use crate::pairing::Pairing;

    #[test]
    fn ground_truth_examples() {
        let s = SparsityPattern::from_rows(&[[1u8], [1]]).unwrap();
        let f = FeatureTensor::new(&s, 1, vec![2.0, 4.0]).unwrap();
        assert_eq!(fuse_ground_truth(&f, FusionMode::Average), vec![3.0]);
        assert_eq!(fuse_ground_truth(&f, FusionMode::Max), vec![4.0]);
        let s = SparsityPattern::from_rows(&[[0u8], [1]]).unwrap();
        let f = FeatureTensor::new(&s, 1, vec![0.0, 6.0]).unwrap();
        assert_eq!(fuse_ground_truth(&f, FusionMode::Average), vec![3.0]);
    }

    #[test]
    fn features_respect_sparsity() {
        let s = SparsityPattern::from_rows(&[[1u8, 0, 1], [0, 1, 1]]).unwrap();
        assert!(FeatureTensor::new(&s, 1, vec![1.0, 1.0, 1.0, 0.0, 1.0, 1.0]).is_err());
        let f = generate_features(&s, 4, 3).unwrap();
        assert!(f.feature(0, 1).iter().all(|&x| x == 0.0));
        assert!(f.feature(1, 2).iter().all(|&x| x != 0.0));
    }

    #[test]
    fn average_matches_direct_mean() {
        let s = generate_sparsity(4, 10, 0.5, 1).unwrap();
        let f = generate_features(&s, 3, 2).unwrap();
        let g = fuse_ground_truth(&f, FusionMode::Average);
        for x in 0..10 {
            for i in 0..3 {
                let direct: f64 = (0..4).map(|a| f.feature(a, x)[i]).sum::<f64>() / 4.0;
                assert!((g[x * 3 + i] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_limit_is_exact() {
        let h = generate_channels(3, 6, RicianParams::default(), 5).unwrap();
        let s = generate_sparsity(3, 6, 1.0 / 3.0, 6).unwrap();
        let f = generate_features(&s, 8, 7).unwrap();
        let alloc = Allocation::with_optimal_power(Pairing::sequential(6, 6).unwrap(), s, &h, 1.0, 1e-30).unwrap();
        let r = simulate_round(&f, &alloc, &h, 1e-30, 0.0, 1.0, 8).unwrap();
        assert!(r.mse < 1e-20, "mse {}", r.mse);
    }

    #[test]
    fn single_agent_noise_variance() {
        // K = 1, sigma = 1, gamma = 4: error variance 1 / (2 * 4) = 1/8.
        let s = SparsityPattern::all_ones(1, 1).unwrap();
        let h = ChannelMatrix::new(1, 1, vec![Complex64::new(0.6, 0.8)]).unwrap();
        let n = 1_000_000;
        let f = generate_features(&s, n, 11).unwrap();
        let alloc = Allocation::with_optimal_power(Pairing::sequential(1, 1).unwrap(), s, &h, 4.0, 1.0).unwrap();
        assert!((alloc.receive_snr - 4.0).abs() < 1e-12);
        let r = simulate_round(&f, &alloc, &h, 1.0, 0.0, 1.0, 12).unwrap();
        assert!((r.mse / 0.125 - 1.0).abs() < 0.01, "mse {}", r.mse);
    }

    #[test]
    fn mean_restoration_is_unbiased() {
        // With a nonzero normalisation mean the estimate stays centred on the truth.
        let s = SparsityPattern::from_rows(&[[1u8, 1], [0, 1], [1, 0]]).unwrap();
        let h = generate_channels(3, 2, RicianParams::default(), 21).unwrap();
        let n = 200_000;
        let mut values = vec![0.0; 3 * 2 * n];
        for a in 0..3 {
            for x in 0..2 {
                if s.get(a, x) {
                    values[(a * 2 + x) * n..(a * 2 + x + 1) * n]
                        .iter_mut()
                        .for_each(|f| *f = 1.5 + a as f64);
                }
            }
        }
        let f = FeatureTensor::new(&s, n, values).unwrap();
        let alloc = Allocation::with_optimal_power(Pairing::sequential(2, 2).unwrap(), s, &h, 1e-3, 1e-7).unwrap();
        let r = simulate_round(&f, &alloc, &h, 1e-7, 0.7, 2.0, 22).unwrap();
        for x in 0..2 {
            let bias: f64 = (0..n)
                .map(|i| r.estimate[x * n + i] - r.ground_truth[x * n + i])
                .sum::<f64>()
                / n as f64;
            let se = (r.per_voxel_mse[x] / n as f64).sqrt();
            assert!(bias.abs() < 4.0 * se, "voxel {x}: bias {bias}, se {se}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let h = generate_channels(2, 4, RicianParams::default(), 1).unwrap();
        let s = generate_sparsity(2, 4, 0.5, 2).unwrap();
        let f = generate_features(&s, 5, 3).unwrap();
        let alloc = Allocation::with_optimal_power(Pairing::sequential(4, 4).unwrap(), s, &h, 0.01, 1e-7).unwrap();
        let a = simulate_round(&f, &alloc, &h, 1e-7, 0.0, 1.0, 9).unwrap();
        let b = simulate_round(&f, &alloc, &h, 1e-7, 0.0, 1.0, 9).unwrap();
        assert_eq!(a, b);
    }
}
