use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::{CliError, CliResult};
use config::ExperimentConfig;

/// Dephasing of a qubit coupled to a bath of Morse oscillators.
#[derive(Parser)]
#[command(name = "dephasing", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment configuration file
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Override the configured lambda grid with one value
    #[arg(long)]
    lambda: Option<f64>,
    /// Override the configured beta list with one value
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Bound-state energies and position matrix elements
    Spectrum {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
    /// Discretized bath modes
    Bath(PointArgs),
    /// Bath correlation function and decay exponent
    Correlation(PointArgs),
    /// Exact and Gaussian decay factors
    Dynamics(PointArgs),
    /// Dephasing time over the (lambda, beta) grid
    SweepDephasing(ConfigArgs),
    /// Information backflow over the (lambda, beta) grid
    SweepBackflow(ConfigArgs),
    /// Time-averaged error of the Gaussian map
    GaussianError {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also write the per-time errors here
        #[arg(long)]
        pointwise: Option<PathBuf>,
    },
    /// Compare against dense evolution and quadrature
    OracleCheck(ConfigArgs),
}

fn load(args: &ConfigArgs) -> CliResult<ExperimentConfig> {
    Ok(ExperimentConfig::load(&args.config)?)
}

fn load_point(args: &PointArgs) -> CliResult<ExperimentConfig> {
    let mut config = load(&args.config)?;
    if let Some(lambda) = args.lambda {
        config.lambda_grid = vec![lambda];
    }
    if let Some(beta) = args.beta {
        config.beta_list = vec![beta];
    }
    Ok(config)
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(CliError::Failed(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Failed("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Spectrum { lambda, omega } => emit(&commands::spectrum(*lambda, *omega)?, out),
        Command::Bath(args) => emit(&commands::bath(&load_point(args)?)?, out),
        Command::Correlation(args) => emit(&commands::correlation(&load_point(args)?)?, out),
        Command::Dynamics(args) => emit(&commands::dynamics(&load_point(args)?)?, out),
        Command::SweepDephasing(args) => emit(&commands::sweep_dephasing(&load(args)?)?, out),
        Command::SweepBackflow(args) => emit(&commands::sweep_backflow(&load(args)?)?, out),
        Command::GaussianError { config, pointwise } => {
            let (summary, per_time) = commands::gaussian_error_tables(&load(config)?)?;
            if let Some(path) = pointwise {
                emit(&per_time, Some(path))?;
            }
            emit(&summary, out)
        }
        Command::OracleCheck(args) => {
            let (table, pass) = commands::oracle_check(&load(args)?)?;
            emit(&table, out)?;
            if pass {
                Ok(())
            } else {
                Err(CliError::Failed("oracle check failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
