use std::time::Instant;

use rayon::prelude::*;

use super::config::{Settings, Solver};
use super::record::MetricsRecord;
use crate::error::Result;
use crate::greedy::greedy_pairing;
use crate::model::{
    cost_matrix, generate_channels, generate_sparsity, homogeneous_partition, ChannelMatrix, CostMatrix,
    SparsityPattern,
};
use crate::optimal::{optimal_pairing_with, SolverOptions, SolverStats};
use crate::pairing::{objective, Pairing};
use crate::power::Allocation;
use crate::seed::{derive, stream};
use crate::sim::{airfusion_latency, digital_latency, generate_features, simulate_round, FeatureTensor};
use crate::units::dbm_to_watts;

/// Normalisation statistics of the synthetic features.
const FEATURE_MEAN: f64 = 0.0;
const FEATURE_STD: f64 = 1.0;

/// The random draw of one trial.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub channels: ChannelMatrix,
    pub pattern: SparsityPattern,
    pub costs: CostMatrix,
    pub entropy: f64,
}

/// Channels and sparsity of trial `trial`, drawn from independent seed streams.
pub fn trial_instance(settings: &Settings, trial: usize) -> Result<TrialInstance> {
    let c = &settings.config;
    let seed = |s: u64| derive(c.seed, &[trial as u64, s]);
    let channels = generate_channels(c.k, c.m, settings.rician(), seed(stream::CHANNELS))?;
    let pattern = generate_sparsity(c.k, c.v, c.sparsity_prob, seed(stream::SPARSITY))?;
    let costs = cost_matrix(&channels, settings.n0_w)?;
    let entropy = homogeneous_partition(&pattern).entropy();
    Ok(TrialInstance {
        channels,
        pattern,
        costs,
        entropy,
    })
}

/// A power-independent pairing decision of one solver.
struct Plan {
    solver: Solver,
    pairing: Option<(Pairing, SparsityPattern)>,
    stats: Option<SolverStats>,
    wall_time_secs: f64,
}

fn plan(settings: &Settings, inst: &TrialInstance, solver: Solver) -> Result<Plan> {
    let start = Instant::now();
    let (v, m) = (inst.pattern.num_voxels(), inst.channels.num_subcarriers());
    let mut stats = None;
    let pairing = match solver {
        Solver::Optimal => {
            let options = SolverOptions {
                max_iterations: settings.iteration_limit(),
                warm_start: settings.config.solver_warm_start,
                ..Default::default()
            };
            let sol = optimal_pairing_with(&inst.pattern, &inst.costs, options)?;
            let mut pairing = sol.pairing;
            if !sol.stats.complete {
                // An interrupted search keeps the better of its incumbent and the greedy pairing.
                let greedy = greedy_pairing(&inst.pattern, &inst.costs)?;
                if objective(&greedy, &inst.pattern, &inst.costs)?.value < sol.objective {
                    pairing = greedy;
                }
            }
            stats = Some(sol.stats);
            Some((pairing, inst.pattern.clone()))
        }
        Solver::Greedy => Some((greedy_pairing(&inst.pattern, &inst.costs)?, inst.pattern.clone())),
        Solver::Vanilla => Some((Pairing::sequential(v, m)?, inst.pattern.clone())),
        Solver::Naive => Some((
            Pairing::sequential(v, m)?,
            SparsityPattern::all_ones(inst.pattern.num_agents(), v)?,
        )),
        Solver::Digital => None,
    };
    Ok(Plan {
        solver,
        pairing,
        stats,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Records of one trial at each listed power, ordered by (power, solver).
///
/// Pairings do not depend on `P_max`, so every solver runs once and only
/// the power allocation, the fusion round and the digital latency are
/// repeated per power point.
pub fn run_trial_at_powers(settings: &Settings, trial: usize, powers_dbm: &[f64]) -> Result<Vec<Vec<MetricsRecord>>> {
    let c = &settings.config;
    let inst = trial_instance(settings, trial)?;
    let plans: Vec<Plan> = c
        .solvers
        .iter()
        .map(|&s| plan(settings, &inst, s))
        .collect::<Result<_>>()?;
    let features: Option<FeatureTensor> = if plans.iter().any(|p| p.pairing.is_some()) {
        Some(generate_features(
            &inst.pattern,
            c.feature_dim,
            derive(c.seed, &[trial as u64, stream::FEATURES]),
        )?)
    } else {
        None
    };
    let air_latency = airfusion_latency(
        inst.pattern.num_nonsparse_voxels(),
        c.feature_dim,
        c.b_sub_hz,
        c.m,
        settings.latency_model,
    );

    let mut out = Vec::with_capacity(powers_dbm.len());
    for (pi, &p_dbm) in powers_dbm.iter().enumerate() {
        let p_w = dbm_to_watts(p_dbm);
        let mut records = Vec::with_capacity(plans.len());
        for plan in &plans {
            let mut rec = MetricsRecord {
                trial,
                solver: plan.solver,
                m: c.m,
                p_max_dbm: p_dbm,
                mse: None,
                gamma_star: None,
                objective: None,
                entropy: inst.entropy,
                n_sol: plan.stats.as_ref().map(|s| s.leaves),
                nodes_visited: plan.stats.as_ref().map(|s| s.nodes_visited),
                compact_space_size: plan.stats.as_ref().map(|s| s.compact_space_size.clone()),
                search_complete: plan.stats.as_ref().map(|s| s.complete),
                latency_seconds: air_latency,
                wall_time_secs: Some(plan.wall_time_secs),
            };
            match (&plan.pairing, &features) {
                (Some((pairing, participation)), Some(features)) => {
                    let alloc = Allocation::with_optimal_power(
                        pairing.clone(),
                        participation.clone(),
                        &inst.channels,
                        p_w,
                        settings.n0_w,
                    )?;
                    let noise_seed = derive(
                        c.seed,
                        &[trial as u64, stream::NOISE, plan.solver.index() as u64, pi as u64],
                    );
                    let fused = simulate_round(
                        features,
                        &alloc,
                        &inst.channels,
                        settings.n0_w,
                        FEATURE_MEAN,
                        FEATURE_STD,
                        noise_seed,
                    )?;
                    rec.mse = Some(fused.mse);
                    rec.gamma_star = Some(alloc.receive_snr);
                    rec.objective = Some(alloc.objective);
                }
                _ => {
                    rec.latency_seconds = digital_latency(
                        &inst.pattern,
                        &inst.channels,
                        p_w,
                        settings.n0_w,
                        c.quant_bits,
                        c.feature_dim,
                        c.b_sub_hz,
                    )?;
                }
            }
            records.push(rec);
        }
        out.push(records);
    }
    Ok(out)
}

/// One record per enabled solver at the configured power, in solver order.
pub fn run_trial(settings: &Settings, trial: usize) -> Result<Vec<MetricsRecord>> {
    Ok(run_trial_at_powers(settings, trial, &[settings.config.p_max_dbm])?
        .pop()
        .unwrap_or_default())
}

/// All trials at the configured power, ordered by (trial, solver).
pub fn simulate(settings: &Settings) -> Result<Vec<MetricsRecord>> {
    let per_trial: Vec<Vec<MetricsRecord>> = (0..settings.config.trials)
        .into_par_iter()
        .map(|t| run_trial(settings, t))
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// All trials at every power, ordered by (power, trial, solver).
pub fn power_sweep(settings: &Settings, powers_dbm: &[f64]) -> Result<Vec<MetricsRecord>> {
    let per_trial: Vec<Vec<Vec<MetricsRecord>>> = (0..settings.config.trials)
        .into_par_iter()
        .map(|t| run_trial_at_powers(settings, t, powers_dbm))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(per_trial.len() * powers_dbm.len() * settings.config.solvers.len());
    for pi in 0..powers_dbm.len() {
        for trial in &per_trial {
            out.extend(trial[pi].iter().cloned());
        }
    }
    Ok(out)
}

/// Optimal-solver records for each subcarrier count, with `V = M`, ordered by (M, trial).
pub fn m_sweep(settings: &Settings, m_values: &[usize]) -> Result<Vec<MetricsRecord>> {
    let mut out = Vec::new();
    for &m in m_values {
        let mut s = settings.clone();
        s.config.m = m;
        s.config.v = m;
        s.config.solvers = vec![Solver::Optimal];
        out.extend(simulate(&s)?);
    }
    Ok(out)
}

/// Mean of `f` over the records of `solver`, skipping missing values.
pub fn mean_by_solver(
    records: &[MetricsRecord],
    solver: Solver,
    f: impl Fn(&MetricsRecord) -> Option<f64>,
) -> Option<f64> {
    let xs: Vec<f64> = records.iter().filter(|r| r.solver == solver).filter_map(f).collect();
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}
