use std::path::PathBuf;
use std::process::ExitCode;

use chancal::commands::{self, CalibrateArgs, SimulateArgs, ValidateArgs};
use chancal::config::ModelKind;
use chancal::error::{CliError, CliResult, EXIT_OK};
use clap::{Parser, Subcommand};

/// Likelihood-free calibration of stochastic radio channel models.
///
/// Set CHANCAL_WORKERS to limit the number of worker threads; results do not
/// depend on it. RUST_LOG controls log verbosity (default `info`).
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw transfer-function realizations from a model.
    Simulate {
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
        /// Comma-separated parameter vector in the model's order; defaults to the prior midpoint.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Option<Vec<f64>>,
        /// Number of rows; defaults to 100 for sv and one call (|Tx|·|Rx| rows) for pg.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// TOML room geometry for pg.
        #[arg(long)]
        geometry: Option<PathBuf>,
        /// Include direct Tx→Rx edges (pg).
        #[arg(long)]
        direct: bool,
        /// Pool this many independent model calls into the rows.
        #[arg(long, default_value_t = 1)]
        calls: usize,
    },
    /// Run PMC-ABC against an observed dataset.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
    },
    /// Print the unbiased MMD² between the log moments of two datasets.
    Mmd {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 4)]
        i_moments: usize,
    },
    /// Compare a dataset with simulations at the posterior mean.
    Validate {
        #[arg(long)]
        data: PathBuf,
        /// A posterior_t<k>.csv written by `calibrate`.
        #[arg(long)]
        posterior: PathBuf,
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        geometry: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { model, theta, n, out, seed, config, geometry, direct, calls } => {
            let r = commands::simulate(&SimulateArgs { model, theta, n, out, seed, config, geometry, direct, calls })?;
            println!("wrote {} rows, seed {}", r.rows, r.seed);
        }
        Command::Calibrate { config, data, out, seed, model } => {
            commands::calibrate(&CalibrateArgs { config, data, out: out.clone(), seed, model })?;
            println!("results in {}", out.display());
        }
        Command::Mmd { a, b, i_moments } => {
            let r = commands::mmd(&a, &b, i_moments)?;
            println!("{:e}", r.mmd2);
            log::info!("lengthscale {:e}", r.lengthscale);
        }
        Command::Validate { data, posterior, model, config, geometry, out, seed } => {
            let r = commands::validate(&ValidateArgs { data, posterior, model, config, geometry, out, seed })?;
            println!(
                "KS p0 {:.3}, mean delay {:.3}, rms delay spread {:.3}",
                r.ks_p0, r.ks_mean_delay, r.ks_rms_delay_spread
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = std::env::var("CHANCAL_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            let code = e.exit_code();
            if let CliError::Calibration(f) = &e {
                log::error!("calibration stopped at iteration {}; partial results written", f.iteration);
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
