//! Command-line interface: wires JSON run configs to the library and
//! emits machine-readable reports.
//!
//! Exit codes: 0 success, 1 validation error, 2 computation error,
//! 3 at least one verification FAIL.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CmdError;
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "ustat",
    about = "U-statistics: exact decomposition, moment/tail bounds, seeded verification",
    version
)]
struct Cli {
    /// JSON run configuration (see README for the schema).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for simulation; 0 uses the default pool.
    /// Never changes any output, only wall-clock time.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output directory for reports and curves.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Osekowski constant and the gamma table.
    ///
    /// Example: ustat constants --out reports
    Constants,
    /// Projection kernels, their variances, and the rank, as JSON.
    ///
    /// Example: ustat decompose --config configs/product.json --out reports
    Decompose,
    /// Exact and asymptotic variance of U(n).
    ///
    /// Example: ustat variance --config configs/product.json --out reports
    Variance,
    /// Moment bounds: detailed sum, normalized form, effective constant.
    ///
    /// Example: ustat bound --config configs/product.json --out reports
    Bound,
    /// Natural-psi norm and the uniform transformed-norm bound.
    ///
    /// Example: ustat norm --config configs/product.json --out reports
    Norm,
    /// Tail envelope curve (x, envelope, empirical_tail) as CSV.
    ///
    /// Example: ustat tail --config configs/product.json --out reports
    Tail,
    /// Seeded simulation of U(n)/sigma(n); report JSON plus CSV curves.
    ///
    /// Example: ustat simulate --config configs/product.json --seed 7 --out reports
    Simulate,
    /// Simulate, then compare every estimate against its bound.
    ///
    /// Example: ustat verify --config configs/product.json --seed 7 --out reports
    Verify {
        /// Halve all theoretical values; the run must then FAIL (exit 3).
        #[arg(long)]
        negative_control: bool,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CmdError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CmdError::Validation("this command needs --config".to_string()))?;
    RunConfig::load(path).map_err(CmdError::Validation)
}

fn run(cli: &Cli) -> Result<bool, CmdError> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Constants => commands::constants(out).map(|_| true),
        Command::Decompose => {
            let cfg = load_config(cli)?;
            commands::decompose_cmd(&cfg, out).map(|_| true)
        }
        Command::Variance => {
            let cfg = load_config(cli)?;
            commands::variance_cmd(&cfg, out).map(|_| true)
        }
        Command::Bound => {
            let cfg = load_config(cli)?;
            commands::bound_cmd(&cfg, out).map(|_| true)
        }
        Command::Norm => {
            let cfg = load_config(cli)?;
            commands::norm_cmd(&cfg, out).map(|_| true)
        }
        Command::Tail => {
            let cfg = load_config(cli)?;
            let seed = cli.seed.or(cfg.seed).unwrap_or(0);
            commands::tail_cmd(&cfg, out, seed, cli.workers).map(|_| true)
        }
        Command::Simulate => {
            let cfg = load_config(cli)?;
            let seed = cli.seed.or(cfg.seed).unwrap_or(0);
            commands::simulate_cmd(&cfg, out, seed, cli.workers).map(|_| true)
        }
        Command::Verify { negative_control } => {
            let cfg = load_config(cli)?;
            let seed = cli.seed.or(cfg.seed).unwrap_or(0);
            commands::verify_cmd(&cfg, out, seed, cli.workers, *negative_control)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(CmdError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
