use std::path::PathBuf;
use std::process::ExitCode;

use affine_volterra::experiments::{run, Command, RunConfig};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

/// Riccati–Volterra solvers, transforms and Monte Carlo checks for affine
/// Volterra processes.
#[derive(Parser, Debug)]
#[command(name = "avolterra", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (overrides VOLTERRA_THREADS and the config).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (overrides VOLTERRA_OUT and the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Solve one Riccati–Volterra equation.
    Riccati,
    /// Characteristic function sweep of the log price.
    Cf,
    /// European call prices by Fourier inversion.
    Price,
    /// Simulate a Hawkes population.
    HawkesSimulate,
    /// Monte Carlo against the Hawkes transform.
    HawkesValidate,
    /// Monte Carlo of the multifactor lift against the Heston transform.
    LiftValidate,
    /// Approximating-kernel stability harness.
    Stability,
    /// Empirical orders of the Riccati solver.
    Convergence,
    /// Modulus of continuity against its moment bound.
    ModulusCheck,
}

impl Cmd {
    fn command(self) -> Command {
        match self {
            Cmd::Riccati => Command::Riccati,
            Cmd::Cf => Command::Cf,
            Cmd::Price => Command::Price,
            Cmd::HawkesSimulate => Command::HawkesSimulate,
            Cmd::HawkesValidate => Command::HawkesValidate,
            Cmd::LiftValidate => Command::LiftValidate,
            Cmd::Stability => Command::Stability,
            Cmd::Convergence => Command::Convergence,
            Cmd::ModulusCheck => Command::ModulusCheck,
        }
    }
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

fn execute(cli: Cli) -> Result<bool> {
    let command = cli.command.command();
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text).with_context(|| format!("invalid config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(c) = config.command {
        if c != command {
            bail!("config is for `{}` but `{}` was requested", c.name(), command.name());
        }
    }
    if let Some(seed) = cli.seed {
        config.simulation.seed = Some(seed);
    }
    let threads = match (cli.threads, env_var("VOLTERRA_THREADS")) {
        (Some(n), _) => Some(n),
        (None, Some(v)) => Some(v.parse().with_context(|| format!("VOLTERRA_THREADS = {v:?}"))?),
        (None, None) => config.threads,
    };
    let out = cli
        .out
        .or_else(|| env_var("VOLTERRA_OUT").map(PathBuf::from))
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(command.name()));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            bail!("thread count must be positive");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("building the worker pool")?;
    let report = pool.install(|| run(command, &config))?;
    report.write_to(&out).with_context(|| format!("writing {}", out.display()))?;

    for row in report.failures() {
        println!("FAIL {} {} value={} reference={:?} std_error={:?}", row.case, row.metric, row.value, row.reference, row.std_error);
    }
    let passed = report.passed();
    let checks = report.rows.iter().filter(|r| r.pass.is_some()).count();
    println!(
        "{} {}: {} checks, {} failed, output in {}",
        if passed { "PASS" } else { "FAIL" },
        command.name(),
        checks,
        report.failures().count(),
        out.display()
    );
    Ok(passed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
