//! `airfusion`: solve single instances and run seeded experiments.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airfusion_core::harness::{
    entropy_buckets, format_entropy_buckets, m_sweep, mean_by_solver, parse_solver_list, power_sweep, simulate,
    table1_from_records, trial_instance, write_csv, ExperimentConfig, MetricsRecord, Settings, Solver,
};
use airfusion_core::instance::{read_instance, Instance};
use airfusion_core::oracle::{brute_force_compact, brute_force_permutations};
use airfusion_core::seed::derive;
use airfusion_core::sim::{digital_latency, naive_allocation, vanilla_allocation};
use airfusion_core::{
    cost_matrix, dfs_optimal, generate_channels, generate_sparsity, greedy_voca_ppa, optimal_pairing_with, Allocation,
    Error, RicianParams, SolverOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "airfusion",
    version,
    about = "Voxel-carrier pairing and over-the-air fusion experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance (from a file or drawn from the seed) with every enabled solver.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Instance file; when omitted an instance is drawn from the configuration and seed.
        #[arg(long, value_name = "PATH")]
        instance: Option<PathBuf>,
    },
    /// Run trials at the configured power and write one record per trial and solver.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep power, entropy bucket or subcarrier count.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated sweep values (dBm for power, M for m). Defaults come from the config.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Optimal-search statistics per subcarrier count.
    Table1 {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subcarrier counts (V = M).
        #[arg(long, value_delimiter = ',')]
        m_values: Vec<usize>,
    },
    /// Check the tree search against both brute-force oracles on small random instances.
    OracleCheck {
        /// Number of random instances (K in 2..=4, M = V in 4..=7).
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Base seed of the instance draws.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of trials; overrides the config.
    #[arg(long)]
    trials: Option<usize>,
    /// Write records as CSV to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Comma-separated subset of optimal,greedy,vanilla,naive,digital.
    #[arg(long, value_name = "LIST")]
    solvers: Option<String>,
    /// Over-the-air latency model: parallel or literal.
    #[arg(long, value_name = "MODEL")]
    latency_model: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    #[value(name = "power_dbm")]
    Power,
    #[value(name = "entropy_bucket")]
    Entropy,
    #[value(name = "m")]
    M,
}

/// Failures sorted by exit code.
enum Failure {
    /// Bad configuration or input: exit 1.
    Config(String),
    /// A check failed or a solver misbehaved: exit 2.
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InstanceFormat { .. }
            | Error::InvalidParameter(_)
            | Error::InvalidProbability(_) => Failure::Config(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

impl Common {
    fn settings(&self) -> CliResult<Settings> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if let Some(list) = &self.solvers {
            config.solvers = parse_solver_list(list)?;
        }
        if let Some(model) = &self.latency_model {
            config.latency_model = model.clone();
        }
        Ok(config.validate()?)
    }

    fn emit(&self, settings: &Settings, records: &[MetricsRecord]) -> CliResult<()> {
        let wall = settings.config.include_wall_time;
        match &self.out {
            Some(path) => write_csv(BufWriter::new(create(path)?), records, wall)?,
            None => write_csv(io::stdout().lock(), records, wall)?,
        }
        Ok(())
    }
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| Failure::Config(format!("cannot create {}: {e}", path.display())))
}

/// Summary lines go to stdout when records go to a file, otherwise to stderr.
fn summary_sink(common: &Common) -> Box<dyn Write> {
    if common.out.is_some() {
        Box::new(io::stdout())
    } else {
        Box::new(io::stderr())
    }
}

fn print_means(out: &mut dyn Write, settings: &Settings, records: &[MetricsRecord]) -> io::Result<()> {
    for &s in &settings.config.solvers {
        let mse = mean_by_solver(records, s, |r| r.mse);
        let latency = mean_by_solver(records, s, |r| Some(r.latency_seconds)).unwrap_or(0.0);
        match mse {
            Some(m) => writeln!(out, "{:<8} mean mse {m:.4e}  latency {latency:.4e} s", s.name())?,
            None => writeln!(out, "{:<8} latency {latency:.4e} s", s.name())?,
        }
    }
    Ok(())
}

fn solve(common: &Common, instance: Option<&Path>) -> CliResult<()> {
    let settings = common.settings()?;
    let c = &settings.config;
    let inst = match instance {
        Some(path) => read_instance(path)?,
        None => {
            let t = trial_instance(&settings, 0)?;
            Instance::new(t.channels, t.pattern)?
        }
    };
    let (p, n0) = (settings.p_max_w, settings.n0_w);
    let (h, s) = (&inst.channels, &inst.pattern);
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "K = {}, V = {}, M = {}, P_max = {} dBm, N0 = {} dBm",
        s.num_agents(),
        s.num_voxels(),
        h.num_subcarriers(),
        c.p_max_dbm,
        c.n0_dbm
    )?;
    let show = |out: &mut dyn Write, name: &str, a: &Allocation| -> io::Result<()> {
        writeln!(out, "{name}: gamma* = {:.6e}, F = {:.6e}", a.receive_snr, a.objective)?;
        let pairs: Vec<String> = a
            .pairing
            .assignment()
            .iter()
            .enumerate()
            .map(|(v, m)| format!("{v}->{m}"))
            .collect();
        writeln!(out, "  pairing {}", pairs.join(" "))
    };
    for &solver in &c.solvers {
        match solver {
            Solver::Optimal => {
                let costs = cost_matrix(h, n0)?;
                let options = SolverOptions {
                    max_iterations: settings.iteration_limit(),
                    ..Default::default()
                };
                let sol = optimal_pairing_with(s, &costs, options)?;
                let stats = sol.stats.clone();
                let a = Allocation::with_optimal_power(sol.pairing, s.clone(), h, p, n0)?;
                show(&mut out, "optimal", &a)?;
                writeln!(
                    out,
                    "  N_sol {}, nodes {}, cuts {}, compact space {}, complete {}, {:.3} s",
                    stats.leaves,
                    stats.nodes_visited,
                    stats.nodes_pruned,
                    stats.compact_space_size,
                    stats.complete,
                    stats.wall_time_secs
                )?;
            }
            Solver::Greedy => show(&mut out, "greedy", &greedy_voca_ppa(s, h, p, n0)?)?,
            Solver::Vanilla => show(&mut out, "vanilla", &vanilla_allocation(s, h, p, n0)?)?,
            Solver::Naive => show(&mut out, "naive", &naive_allocation(h, p, n0, s.num_voxels())?)?,
            Solver::Digital => {
                let l = digital_latency(s, h, p, n0, c.quant_bits, c.feature_dim, c.b_sub_hz)?;
                writeln!(out, "digital: latency {l:.6e} s at {} bits", c.quant_bits)?;
            }
        }
    }
    Ok(())
}

fn sweep(common: &Common, axis: Axis, values: &[f64]) -> CliResult<()> {
    let settings = common.settings()?;
    let c = &settings.config;
    let mut summary = summary_sink(common);
    match axis {
        Axis::Power => {
            let powers = if values.is_empty() {
                c.power_sweep_dbm.clone()
            } else {
                values.to_vec()
            };
            if powers.iter().any(|x| !x.is_finite()) {
                return Err(Failure::Config("power values must be finite".into()));
            }
            let records = power_sweep(&settings, &powers)?;
            common.emit(&settings, &records)?;
            for p in powers {
                writeln!(summary, "P_max = {p} dBm")?;
                let at: Vec<MetricsRecord> = records.iter().filter(|r| r.p_max_dbm == p).cloned().collect();
                print_means(&mut *summary, &settings, &at)?;
            }
        }
        Axis::Entropy => {
            if !values.is_empty() {
                return Err(Failure::Config(
                    "the entropy axis takes no values; set entropy_buckets in the config".into(),
                ));
            }
            let records = simulate(&settings)?;
            common.emit(&settings, &records)?;
            write!(
                summary,
                "{}",
                format_entropy_buckets(&entropy_buckets(&records, c.entropy_buckets))
            )?;
        }
        Axis::M => {
            let ms = m_values(values, &c.table1_m)?;
            let records = m_sweep(&settings, &ms)?;
            common.emit(&settings, &records)?;
            write!(summary, "{}", table1_from_records(c.k, &records))?;
        }
    }
    Ok(())
}

fn m_values(values: &[f64], default: &[usize]) -> CliResult<Vec<usize>> {
    if values.is_empty() {
        return Ok(default.to_vec());
    }
    values
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(Failure::Config(format!(
                    "subcarrier count must be a positive integer, got {x}"
                )))
            }
        })
        .collect()
}

fn table1(common: &Common, ms: &[usize]) -> CliResult<()> {
    let settings = common.settings()?;
    let ms = if ms.is_empty() {
        settings.config.table1_m.clone()
    } else {
        ms.to_vec()
    };
    if ms.contains(&0) {
        return Err(Failure::Config("subcarrier counts must be positive".into()));
    }
    let records = m_sweep(&settings, &ms)?;
    if common.out.is_some() {
        common.emit(&settings, &records)?;
    }
    print!("{}", table1_from_records(settings.config.k, &records));
    Ok(())
}

fn oracle_check(instances: usize, seed: u64) -> CliResult<()> {
    let mut mismatches = 0;
    for i in 0..instances as u64 {
        let k = 2 + (derive(seed, &[i, 0]) % 3) as usize;
        let m = 4 + (derive(seed, &[i, 1]) % 4) as usize;
        let h = generate_channels(k, m, RicianParams::default(), derive(seed, &[i, 2]))?;
        let s = generate_sparsity(k, m, 1.0 / 3.0, derive(seed, &[i, 3]))?;
        let costs = cost_matrix(&h, 1e-7)?;
        let tree = dfs_optimal(&s, &costs)?.objective;
        let perm = brute_force_permutations(&s, &costs)?.best_objective;
        let compact = brute_force_compact(&s, &costs)?.best_objective;
        if tree != perm || compact != perm {
            mismatches += 1;
            eprintln!("instance {i} (K = {k}, M = V = {m}): tree {tree:e}, permutations {perm:e}, compact {compact:e}");
        }
    }
    println!("{instances} instances, {mismatches} mismatches");
    if mismatches > 0 {
        return Err(Failure::Internal(format!("{mismatches} oracle mismatches")));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve { common, instance } => solve(&common, instance.as_deref()),
        Command::Simulate { common } => {
            let settings = common.settings()?;
            let records = simulate(&settings)?;
            common.emit(&settings, &records)?;
            print_means(&mut *summary_sink(&common), &settings, &records)?;
            Ok(())
        }
        Command::Sweep { common, axis, values } => sweep(&common, axis, &values),
        Command::Table1 { common, m_values } => table1(&common, &m_values),
        Command::OracleCheck { instances, seed } => oracle_check(instances, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
