//! `attenuant`: figure tables, verification suites and capacity-floor reports.

mod config;
mod error;
mod figures;
mod floor;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use attenuant_core::schemes::{FigureGrid, FigureId, DEFAULT_EPS};
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{Format, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "attenuant", version, about = "General attenuator capacity toolkit")]
struct Cli {
    /// Worker threads; overrides ATTENUANT_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one CSV per figure into the output directory.
    Figures {
        /// icoh_main, icoh_xi or icoh_xi_prime; all three when omitted.
        #[arg(long)]
        id: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,20")]
        n: Vec<usize>,
        /// Points per λ or η axis.
        #[arg(long, default_value_t = 301)]
        points: usize,
        /// Largest n on the ξ'(n) curve.
        #[arg(long, default_value_t = 35)]
        nmax: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run verification suites and print a JSON report.
    Verify {
        /// Suite name or `all`; may be repeated.
        #[arg(long, default_values_t = ["all".to_string()])]
        suite: Vec<String>,
        #[arg(long, default_value_t = 200)]
        nmax: usize,
        /// λ points per interval [1/(n+1), 1/n].
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Largest photon-number block in the unitarity suite.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified single-copy capacity floor at input energy 1/2.
    Floor {
        #[arg(long, default_value_t = 0.005)]
        lambda_min: f64,
        /// Evaluate a single transmissivity instead of sweeping.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Log-spaced points of the sweep, before the 1/n points are merged in.
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    config: &'a RunConfig,
    passed: bool,
    suites: Vec<verify::SuiteReport>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let threads = config::thread_count(cli.threads)?;
    match cli.command {
        Command::Figures { id, n, points, nmax, out } => {
            let config = RunConfig {
                command: "figures".into(),
                cutoff: None,
                resolution: points,
                eps: DEFAULT_EPS,
                n_max: nmax,
                output: Some(out.clone()),
                format: Format::Csv,
                threads,
            };
            let pool = pool(&config)?;
            let ids: Vec<FigureId> = if id.is_empty() {
                vec![FigureId::IcohMain, FigureId::IcohXi, FigureId::IcohXiPrime]
            } else {
                id.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
            };
            let grid = FigureGrid { ns: n, points, n_range: (3, nmax) };
            std::fs::create_dir_all(&out)?;
            pool.install(|| {
                for id in ids {
                    let path = figures::write_figure(id, &grid, &out)?;
                    eprintln!("wrote {}", path.display());
                }
                Ok(true)
            })
        }
        Command::Verify { suite, nmax, points, cutoff, out } => {
            let config = RunConfig {
                command: "verify".into(),
                cutoff,
                resolution: points,
                eps: DEFAULT_EPS,
                n_max: nmax,
                output: out.clone(),
                format: Format::Json,
                threads,
            };
            let pool = pool(&config)?;
            let names: Vec<String> = if suite.iter().any(|s| s == "all") {
                verify::SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                suite
            };
            let params = verify::Params { n_max: nmax, points, block_max: cutoff.unwrap_or(40) };
            let suites = pool.install(|| names.iter().map(|s| verify::run(s, &params)).collect::<Result<Vec<_>, _>>())?;
            let passed = suites.iter().all(|s| s.passed);
            output::write_json(&VerifyReport { config: &config, passed, suites }, out.as_deref())?;
            Ok(passed)
        }
        Command::Floor { lambda_min, lambda, eps, points, format, out } => {
            let config = RunConfig {
                command: "floor".into(),
                cutoff: None,
                resolution: points,
                eps,
                n_max: ((1.0 / lambda.unwrap_or(lambda_min)).floor() as usize).max(2),
                output: out,
                format,
                threads,
            };
            let pool = pool(&config)?;
            pool.install(|| floor::run(&config, lambda, lambda_min))?;
            Ok(true)
        }
    }
}

fn pool(config: &RunConfig) -> Result<rayon::ThreadPool, CliError> {
    config.validate()?;
    Ok(rayon::ThreadPoolBuilder::new().num_threads(config.threads).build()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
