use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ratlog_cli::cache::CACHE_ENV;
use ratlog_cli::config::{self, Command};
use ratlog_cli::run::{resolve_cache_dir, resolve_out_dir, Runner};
use ratlog_cli::CliError;

#[derive(Parser)]
#[command(name = "ratlog", version, about = "Rational approximation distances for symbols with logarithmic singularities")]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Series cache directory (overrides the config and $RATLOG_CACHE_DIR).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for iterative solvers and randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Predicted limits as JSON.
    Predict,
    /// Coefficient series of both sides as CSV.
    Coeffs,
    /// Leading singular values per section size.
    Svd,
    /// Distances, ratio tables and reports per section size.
    Distance,
    /// Ratio tables with plots, then the configured checks.
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Predict => Command::Predict,
            Cmd::Coeffs => Command::Coeffs,
            Cmd::Svd => Command::Svd,
            Cmd::Distance => Command::Distance,
            Cmd::Verify => Command::Verify,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config {
                path: "--jobs".into(),
                message: "must be at least 1".into(),
            });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let Some(path) = cli.config else {
        return Err(CliError::Config {
            path: "--config".into(),
            message: "a config file is required".into(),
        });
    };
    let cfg = config::load(&path)?;
    let commands: Vec<Command> = match cli.command {
        Some(c) => vec![c.into()],
        None => cfg.commands.clone(),
    };
    if let Some(cmd) = commands.iter().find(|c| !matches!(c, Command::Verify)) {
        cfg.require_symbol(*cmd)?;
    }
    let out = resolve_out_dir(cli.out, cfg.output_dir.clone());
    let cache = resolve_cache_dir(cli.cache, cfg.cache_dir.clone(), std::env::var_os(CACHE_ENV));
    let runner = Runner::new(&cfg, out, cache, cli.seed);
    runner.run_all(&commands)?;
    log::info!("artifacts in {}", runner.out_dir().display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::ChecksFailed { .. } => 1,
                _ => 2,
            })
        }
    }
}
