//! Seeded experiments: configuration, per-trial records, sweeps and reports.
//!
//! Every trial derives its channel, sparsity, feature and noise streams from
//! the base seed and the trial index, and trials run in parallel. Output is
//! always ordered by (power point, trial, solver), so results do not depend on
//! scheduling.

mod config;
mod record;
mod report;
mod run;

pub use config::{parse_solver_list, ExperimentConfig, Settings, Solver};
pub use record::{write_csv, MetricsRecord, CSV_VERSION_LINE};
pub use report::{
    entropy_buckets, format_entropy_buckets, format_sci, nearest_rank_percentile, table1_from_records, table1_report,
    EntropyBucket, Table1, Table1Row,
};
pub use run::{
    m_sweep, mean_by_solver, power_sweep, run_trial, run_trial_at_powers, simulate, trial_instance, TrialInstance,
};
