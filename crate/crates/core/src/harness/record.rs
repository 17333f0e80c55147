use std::io::Write;

use num_bigint::BigUint;

use super::config::Solver;
use crate::error::Result;

/// Version tag written as the first line of every metrics CSV.
pub const CSV_VERSION_LINE: &str = "# airfusion-metrics v1";

/// One row of experiment output: a (trial, solver, power point) triple.
///
/// Fields that do not apply to a solver are `None` and written as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub trial: usize,
    pub solver: Solver,
    /// Number of subcarriers of the instance.
    pub m: usize,
    pub p_max_dbm: f64,
    pub mse: Option<f64>,
    /// Common receive SNR, linear.
    pub gamma_star: Option<f64>,
    /// Max-linear objective `F`.
    pub objective: Option<f64>,
    /// Heterogeneity entropy of the instance, nats.
    pub entropy: f64,
    /// Leaves enumerated by the optimal search.
    pub n_sol: Option<u64>,
    pub nodes_visited: Option<u64>,
    pub compact_space_size: Option<BigUint>,
    /// False when the optimal search hit its iteration budget.
    pub search_complete: Option<bool>,
    pub latency_seconds: f64,
    /// Seconds spent computing the pairing. Not written unless requested, so
    /// that CSV output stays reproducible.
    pub wall_time_secs: Option<f64>,
}

const COLUMNS: [&str; 14] = [
    "trial",
    "solver",
    "m",
    "p_max_dbm",
    "mse",
    "gamma_star",
    "objective",
    "entropy",
    "n_sol",
    "nodes_visited",
    "compact_space_size",
    "search_complete",
    "latency_seconds",
    "wall_time_secs",
];

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl MetricsRecord {
    fn fields(&self, include_wall_time: bool) -> Vec<String> {
        let mut out = vec![
            self.trial.to_string(),
            self.solver.to_string(),
            self.m.to_string(),
            self.p_max_dbm.to_string(),
            opt(&self.mse),
            opt(&self.gamma_star),
            opt(&self.objective),
            self.entropy.to_string(),
            opt(&self.n_sol),
            opt(&self.nodes_visited),
            opt(&self.compact_space_size),
            opt(&self.search_complete),
            self.latency_seconds.to_string(),
        ];
        if include_wall_time {
            out.push(opt(&self.wall_time_secs));
        }
        out
    }
}

/// Writes records as CSV after a version comment line. Rows are written in
/// the given order; the harness already sorts them by (trial, solver).
pub fn write_csv<W: Write>(mut out: W, records: &[MetricsRecord], include_wall_time: bool) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    let n = if include_wall_time {
        COLUMNS.len()
    } else {
        COLUMNS.len() - 1
    };
    w.write_record(&COLUMNS[..n])?;
    for r in records {
        w.write_record(r.fields(include_wall_time))?;
    }
    w.flush()?;
    Ok(())
}
