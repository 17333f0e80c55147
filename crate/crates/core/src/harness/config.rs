use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RicianParams;
use crate::sim::LatencyModel;
use crate::units::dbm_to_watts;

/// Pairing and allocation schemes compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Optimal,
    Greedy,
    Vanilla,
    Naive,
    Digital,
}

impl Solver {
    pub const ALL: [Solver; 5] = [Self::Optimal, Self::Greedy, Self::Vanilla, Self::Naive, Self::Digital];

    pub fn name(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::Greedy => "greedy",
            Self::Vanilla => "vanilla",
            Self::Naive => "naive",
            Self::Digital => "digital",
        }
    }

    /// Position in [`Solver::ALL`], used for seeding and output order.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown solver `{s}` (expected one of optimal, greedy, vanilla, naive, digital)"
            ))
        })
    }
}

/// Parses a comma-separated solver list, keeping canonical order and dropping repeats.
pub fn parse_solver_list(list: &str) -> Result<Vec<Solver>> {
    let mut out: Vec<Solver> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::Config("solver list is empty".into()));
    }
    Ok(out)
}

/// Experiment settings as written in a TOML file. Units are part of the key names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k: usize,
    pub v: usize,
    pub m: usize,
    pub p_max_dbm: f64,
    pub n0_dbm: f64,
    pub rician_ratio_db: f64,
    pub path_loss_db: f64,
    pub b_sub_hz: f64,
    pub feature_dim: usize,
    pub sparsity_prob: f64,
    pub trials: usize,
    pub seed: u64,
    pub solvers: Vec<Solver>,
    pub quant_bits: u32,
    pub latency_model: String,
    /// Child expansions allowed per optimal solve; 0 means unlimited.
    pub solver_iteration_limit: u64,
    /// Seed the optimal search with the greedy objective as incumbent.
    pub solver_warm_start: bool,
    pub power_sweep_dbm: Vec<f64>,
    pub entropy_buckets: usize,
    pub table1_m: Vec<usize>,
    pub include_wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 4,
            v: 26,
            m: 26,
            p_max_dbm: 10.0,
            n0_dbm: -40.0,
            rician_ratio_db: 3.0,
            path_loss_db: -15.0,
            b_sub_hz: 120e3,
            feature_dim: 128,
            sparsity_prob: 1.0 / 3.0,
            trials: 1000,
            seed: 1,
            solvers: Solver::ALL.to_vec(),
            quant_bits: 4,
            latency_model: "parallel".into(),
            solver_iteration_limit: 500_000,
            solver_warm_start: false,
            power_sweep_dbm: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
            entropy_buckets: 8,
            table1_m: vec![8, 16, 32],
            include_wall_time: false,
        }
    }
}

/// Validated settings with powers converted to watts.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub config: ExperimentConfig,
    pub p_max_w: f64,
    pub n0_w: f64,
    pub latency_model: LatencyModel,
}

impl Settings {
    pub fn rician(&self) -> RicianParams {
        RicianParams {
            los_nlos_ratio_db: self.config.rician_ratio_db,
            path_loss_db: self.config.path_loss_db,
        }
    }

    pub fn iteration_limit(&self) -> Option<u64> {
        (self.config.solver_iteration_limit > 0).then_some(self.config.solver_iteration_limit)
    }

    /// Same settings at another power budget.
    pub fn with_power_dbm(&self, p_max_dbm: f64) -> Self {
        let mut out = self.clone();
        out.config.p_max_dbm = p_max_dbm;
        out.p_max_w = dbm_to_watts(p_max_dbm);
        out
    }
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config = Self::from_toml_str(&text)?;
        config.validate_with_source(Some(&text))?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<Settings> {
        self.validate_with_source(None)
    }

    fn validate_with_source(&self, source: Option<&str>) -> Result<Settings> {
        let fail = |key: &str, msg: String| -> Error {
            match source.and_then(|t| line_of(t, key)) {
                Some(line) => Error::Config(format!("line {line}: `{key}` {msg}")),
                None => Error::Config(format!("`{key}` {msg}")),
            }
        };
        let positive = |key: &str, x: usize| {
            if x == 0 {
                Err(fail(key, "must be positive".into()))
            } else {
                Ok(())
            }
        };
        positive("k", self.k)?;
        positive("v", self.v)?;
        positive("m", self.m)?;
        positive("feature_dim", self.feature_dim)?;
        positive("trials", self.trials)?;
        positive("entropy_buckets", self.entropy_buckets)?;
        if self.k > crate::model::MAX_AGENTS {
            return Err(fail("k", format!("must be at most {}", crate::model::MAX_AGENTS)));
        }
        if self.m < self.v {
            return Err(fail("m", format!("must be at least v = {}", self.v)));
        }
        if !(self.sparsity_prob > 0.0 && self.sparsity_prob <= 1.0) {
            return Err(fail(
                "sparsity_prob",
                format!("must lie in (0, 1], got {}", self.sparsity_prob),
            ));
        }
        for (key, x) in [
            ("p_max_dbm", self.p_max_dbm),
            ("n0_dbm", self.n0_dbm),
            ("rician_ratio_db", self.rician_ratio_db),
            ("path_loss_db", self.path_loss_db),
        ] {
            if !x.is_finite() {
                return Err(fail(key, format!("must be finite, got {x}")));
            }
        }
        if !(self.b_sub_hz.is_finite() && self.b_sub_hz > 0.0) {
            return Err(fail("b_sub_hz", format!("must be positive, got {}", self.b_sub_hz)));
        }
        if !(2..=5).contains(&self.quant_bits) {
            return Err(fail("quant_bits", format!("must be in 2..=5, got {}", self.quant_bits)));
        }
        if self.solvers.is_empty() {
            return Err(fail("solvers", "must list at least one solver".into()));
        }
        if self.power_sweep_dbm.iter().any(|x| !x.is_finite()) || self.power_sweep_dbm.is_empty() {
            return Err(fail(
                "power_sweep_dbm",
                "must be a nonempty list of finite values".into(),
            ));
        }
        if self.table1_m.is_empty() || self.table1_m.contains(&0) {
            return Err(fail("table1_m", "must be a nonempty list of positive sizes".into()));
        }
        let latency_model = self.latency_model.parse().map_err(|_| {
            fail(
                "latency_model",
                format!("must be parallel or literal, got `{}`", self.latency_model),
            )
        })?;
        let mut config = self.clone();
        config.solvers.sort();
        config.solvers.dedup();
        Ok(Settings {
            p_max_w: dbm_to_watts(self.p_max_dbm),
            n0_w: dbm_to_watts(self.n0_dbm),
            latency_model,
            config,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let s = ExperimentConfig::default().validate().unwrap();
        assert!((s.p_max_w - 0.01).abs() < 1e-15);
        assert!((s.n0_w - 1e-7).abs() < 1e-20);
        assert_eq!(s.latency_model, LatencyModel::Parallel);
    }

    #[test]
    fn toml_round_trip() {
        let c = ExperimentConfig {
            trials: 7,
            solvers: vec![Solver::Greedy, Solver::Naive],
            ..Default::default()
        };
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = ExperimentConfig::from_toml_str("k = 3\nsolvers = [\"greedy\"]\n").unwrap();
        assert_eq!(c.k, 3);
        assert_eq!(c.v, 26);
        assert_eq!(c.solvers, vec![Solver::Greedy]);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "k = 4\nv = 30\nm = 26\n";
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        let err = c.validate_with_source(Some(text)).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = ExperimentConfig::from_toml_str("k = 4\nbogus = 1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2") && err.contains("bogus"), "{err}");
        let err = ExperimentConfig::from_toml_str("k = \"four\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 1"), "{err}");
        let bad_model = "latency_model = \"warp\"\n";
        let err = ExperimentConfig::from_toml_str(bad_model)
            .unwrap()
            .validate_with_source(Some(bad_model));
        assert!(err.unwrap_err().to_string().contains("line 1"));
    }

    #[test]
    fn solver_lists() {
        assert_eq!(
            parse_solver_list("naive, optimal,naive").unwrap(),
            vec![Solver::Optimal, Solver::Naive]
        );
        assert!(parse_solver_list("optimal,fast").is_err());
        assert!(parse_solver_list(" , ").is_err());
    }
}
