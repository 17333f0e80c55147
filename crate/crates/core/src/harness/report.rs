use std::fmt;

use num_bigint::BigUint;

use super::config::{Settings, Solver};
use super::record::MetricsRecord;
use super::run::m_sweep;
use crate::error::Result;

/// Nearest-rank percentile: the smallest sample with at least `q` percent of
/// the samples at or below it. `None` sorts above every value.
pub fn nearest_rank_percentile(samples: &[Option<u64>], q: f64) -> Option<u64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted: Vec<Option<u64>> = samples.to_vec();
    sorted.sort_by_key(|x| x.map_or((1, 0), |v| (0, v)));
    let rank = ((q / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Decimal scientific notation with three significant digits, e.g. `1.21e4`.
pub fn format_sci(x: &BigUint) -> String {
    let digits = x.to_string();
    let mut exp = digits.len() - 1;
    let padded = format!("{digits:0<4}");
    let lead: u32 = padded[..3].parse().expect("digits");
    let round_up = padded.as_bytes()[3] >= b'5';
    let mut lead = lead + u32::from(round_up);
    if lead == 1000 {
        lead = 100;
        exp += 1;
    }
    let s = format!("{lead:03}");
    format!("{}.{}e{}", &s[..1], &s[1..], exp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub m: usize,
    pub trials: usize,
    /// 95th percentile of `N_sol`; `None` if it lands on an interrupted search.
    pub n_sol_p95: Option<u64>,
    pub n_sol_max: Option<u64>,
    /// Trials whose search hit the iteration budget.
    pub incomplete: usize,
    pub mean_compact_size: BigUint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1 {
    pub k: usize,
    pub rows: Vec<Table1Row>,
}

impl fmt::Display for Table1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: Option<u64>| x.map_or_else(|| "n/a".to_string(), |v| v.to_string());
        writeln!(f, "K = {}", self.k)?;
        writeln!(
            f,
            "{:>4}  {:>7}  {:>10}  {:>10}  {:>10}  {:>14}",
            "M", "trials", "p95 N_sol", "max N_sol", "incomplete", "mean |compact|"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>4}  {:>7}  {:>10}  {:>10}  {:>10}  {:>14}",
                r.m,
                r.trials,
                show(r.n_sol_p95),
                show(r.n_sol_max),
                r.incomplete,
                format_sci(&r.mean_compact_size)
            )?;
        }
        Ok(())
    }
}

/// Summarises optimal-solver records of an M sweep. An interrupted search
/// counts as larger than any completed one when taking percentiles.
pub fn table1_from_records(k: usize, records: &[MetricsRecord]) -> Table1 {
    let mut ms: Vec<usize> = records.iter().map(|r| r.m).collect();
    ms.dedup();
    let rows = ms
        .into_iter()
        .map(|m| {
            let recs: Vec<&MetricsRecord> = records
                .iter()
                .filter(|r| r.m == m && r.solver == Solver::Optimal)
                .collect();
            let n_sol: Vec<Option<u64>> = recs
                .iter()
                .map(|r| {
                    if r.search_complete == Some(false) {
                        None
                    } else {
                        r.n_sol
                    }
                })
                .collect();
            let total: BigUint = recs.iter().filter_map(|r| r.compact_space_size.as_ref()).sum();
            Table1Row {
                m,
                trials: recs.len(),
                n_sol_p95: nearest_rank_percentile(&n_sol, 95.0),
                n_sol_max: nearest_rank_percentile(&n_sol, 100.0),
                incomplete: n_sol.iter().filter(|x| x.is_none()).count(),
                mean_compact_size: if recs.is_empty() {
                    BigUint::default()
                } else {
                    total / recs.len()
                },
            }
        })
        .collect();
    Table1 { k, rows }
}

/// Runs the M sweep and summarises it.
pub fn table1_report(settings: &Settings, m_values: &[usize]) -> Result<Table1> {
    let records = m_sweep(settings, m_values)?;
    Ok(table1_from_records(settings.config.k, &records))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyBucket {
    pub lo: f64,
    pub hi: f64,
    pub trials: usize,
    /// Mean mse per solver, in solver order; `None` for an empty bucket or a
    /// solver without mse.
    pub mean_mse: Vec<(Solver, Option<f64>)>,
}

/// Groups records into `buckets` equal-width entropy bins spanning the
/// observed range and averages mse within each.
pub fn entropy_buckets(records: &[MetricsRecord], buckets: usize) -> Vec<EntropyBucket> {
    if records.is_empty() || buckets == 0 {
        return Vec::new();
    }
    let lo = records.iter().map(|r| r.entropy).fold(f64::INFINITY, f64::min);
    let hi = records.iter().map(|r| r.entropy).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / buckets as f64;
    let index = |e: f64| -> usize {
        if width > 0.0 {
            (((e - lo) / width) as usize).min(buckets - 1)
        } else {
            0
        }
    };
    let mut solvers: Vec<Solver> = records.iter().map(|r| r.solver).collect();
    solvers.sort();
    solvers.dedup();
    (0..buckets)
        .map(|b| {
            let inside: Vec<&MetricsRecord> = records.iter().filter(|r| index(r.entropy) == b).collect();
            let mut trials: Vec<usize> = inside.iter().map(|r| r.trial).collect();
            trials.sort_unstable();
            trials.dedup();
            let mean_mse = solvers
                .iter()
                .map(|&s| {
                    let xs: Vec<f64> = inside.iter().filter(|r| r.solver == s).filter_map(|r| r.mse).collect();
                    (s, (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64))
                })
                .collect();
            EntropyBucket {
                lo: lo + b as f64 * width,
                hi: lo + (b + 1) as f64 * width,
                trials: trials.len(),
                mean_mse,
            }
        })
        .collect()
}

pub fn format_entropy_buckets(buckets: &[EntropyBucket]) -> String {
    let mut out = String::new();
    let Some(first) = buckets.first() else {
        return out;
    };
    out.push_str(&format!("{:>17}  {:>6}", "entropy (nats)", "trials"));
    for (s, _) in &first.mean_mse {
        out.push_str(&format!("  {:>12}", s.name()));
    }
    out.push('\n');
    for b in buckets {
        out.push_str(&format!("{:>7.3} .. {:>6.3}  {:>6}", b.lo, b.hi, b.trials));
        for (_, m) in &b.mean_mse {
            match m {
                Some(x) => out.push_str(&format!("  {x:>12.4e}")),
                None => out.push_str(&format!("  {:>12}", "-")),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_nearest_rank() {
        let xs: Vec<Option<u64>> = (1..=20).map(Some).collect();
        assert_eq!(nearest_rank_percentile(&xs, 95.0), Some(19));
        assert_eq!(nearest_rank_percentile(&xs, 100.0), Some(20));
        assert_eq!(nearest_rank_percentile(&xs, 50.0), Some(10));
        let mut ys = xs.clone();
        ys[0] = None;
        ys[1] = None;
        assert_eq!(nearest_rank_percentile(&ys, 95.0), None);
        assert_eq!(nearest_rank_percentile(&[Some(4)], 95.0), Some(4));
        assert_eq!(nearest_rank_percentile(&[], 95.0), None);
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(&BigUint::from(12_096u32)), "1.21e4");
        assert_eq!(format_sci(&BigUint::from(12_050u32)), "1.21e4");
        assert_eq!(format_sci(&BigUint::from(99_960u32)), "1.00e5");
        assert_eq!(format_sci(&BigUint::from(1000u32)), "1.00e3");
        assert_eq!(format_sci(&BigUint::from(42u32)), "4.20e1");
        assert_eq!(format_sci(&BigUint::from(0u32)), "0.00e0");
        let big: BigUint = "1780000000000000000000000000".parse().unwrap();
        assert_eq!(format_sci(&big), "1.78e27");
    }

    fn rec(trial: usize, solver: Solver, entropy: f64, mse: f64) -> MetricsRecord {
        MetricsRecord {
            trial,
            solver,
            m: 4,
            p_max_dbm: 10.0,
            mse: Some(mse),
            gamma_star: None,
            objective: None,
            entropy,
            n_sol: None,
            nodes_visited: None,
            compact_space_size: None,
            search_complete: None,
            latency_seconds: 0.0,
            wall_time_secs: None,
        }
    }

    #[test]
    fn buckets_cover_range() {
        let recs = vec![
            rec(0, Solver::Optimal, 0.0, 1.0),
            rec(0, Solver::Naive, 0.0, 3.0),
            rec(1, Solver::Optimal, 1.0, 2.0),
            rec(2, Solver::Optimal, 2.0, 4.0),
            rec(3, Solver::Optimal, 1.9, 6.0),
        ];
        let b = entropy_buckets(&recs, 2);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].trials, 1);
        assert_eq!(b[1].trials, 3);
        assert_eq!(
            b[0].mean_mse,
            vec![(Solver::Optimal, Some(1.0)), (Solver::Naive, Some(3.0))]
        );
        assert_eq!(b[1].mean_mse, vec![(Solver::Optimal, Some(4.0)), (Solver::Naive, None)]);
        assert!(format_entropy_buckets(&b).lines().count() == 3);
    }

    #[test]
    fn table_counts_incomplete_as_largest() {
        let mut recs = Vec::new();
        for t in 0..20 {
            let mut r = rec(t, Solver::Optimal, 0.0, 0.0);
            r.n_sol = Some(t as u64 + 1);
            r.search_complete = Some(t != 3);
            r.compact_space_size = Some(BigUint::from(100u32 + t as u32));
            recs.push(r);
        }
        let t = table1_from_records(4, &recs);
        let row = &t.rows[0];
        assert_eq!(row.incomplete, 1);
        assert_eq!(row.n_sol_p95, Some(20));
        assert_eq!(row.n_sol_max, None);
        assert_eq!(row.mean_compact_size, BigUint::from(109u32));
        assert!(t.to_string().contains("1.09e2"));
    }
}
