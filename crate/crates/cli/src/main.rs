//! Command-line front end tying the simulation, PDE, analysis, and bound
//! verification pipelines together behind a single reproducible entry point.

mod commands;
mod config;
mod csvout;
mod manifest;
mod svg;

use clap::{Parser, Subcommand};
use commands::Failure;
use config::ExperimentConfig;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "meanfield", about = "Interacting-particle mean-field toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replica ensemble and store the dataset with energy diagnostics.
    Simulate(RunArgs),
    /// Solve a limiting PDE (kinetic d=1 or first-order d<=2).
    SolvePde(RunArgs),
    /// Estimate marginals and weighted norms from a stored dataset.
    Analyze(RunArgs),
    /// Evaluate the hierarchy bounds and cross-check them by brute force.
    Bounds(RunArgs),
    /// Sweep particle counts and measure marginal convergence.
    Compare {
        #[command(flatten)]
        args: RunArgs,
        /// Override the particle counts, comma separated.
        #[arg(long = "N", value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
    },
    /// Re-verify every artifact hash in an output directory's manifest.
    Selftest {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Parser)]
struct RunArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render SVG plots of the results.
    #[arg(long)]
    plots: bool,
}

fn load(args: &RunArgs) -> Result<(ExperimentConfig, PathBuf, PathBuf), Failure> {
    let config = ExperimentConfig::load(&args.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    let config_dir = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| config_dir.join(&config.output_dir));
    if config.thread_count > 0 {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.thread_count)
            .build_global();
    }
    Ok((config, config_dir, out))
}

fn missing(section: &str) -> Failure {
    Failure::Config(format!("config has no `{section}` section"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => {
            let (config, _, out) = load(&args)?;
            let section = config.simulate.clone().ok_or_else(|| missing("simulate"))?;
            commands::simulate::run(&config, &section, &out, args.plots)
        }
        Command::SolvePde(args) => {
            let (config, _, out) = load(&args)?;
            let section = config.solve_pde.clone().ok_or_else(|| missing("solve_pde"))?;
            commands::solve_pde::run(&config, &section, &out, args.plots)
        }
        Command::Analyze(args) => {
            let (config, config_dir, out) = load(&args)?;
            let section = config.analyze.clone().ok_or_else(|| missing("analyze"))?;
            commands::analyze::run(&config, &section, &config_dir, &out, args.plots)
        }
        Command::Bounds(args) => {
            let (config, _, out) = load(&args)?;
            let section = config.bounds.clone().ok_or_else(|| missing("bounds"))?;
            commands::bounds::run(&config, &section, &out, args.plots)
        }
        Command::Compare { args, n_values } => {
            let (config, _, out) = load(&args)?;
            let section = config.compare.clone().ok_or_else(|| missing("compare"))?;
            commands::compare::run(&config, &section, n_values.as_deref(), &out, args.plots)
        }
        Command::Selftest { dir } => {
            let bad = manifest::verify_manifest(&dir)
                .map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
            if bad.is_empty() {
                println!("selftest ok: all hashes verified in {}", dir.display());
                Ok(())
            } else {
                Err(Failure::Numerical(format!("hash verification failed: {}", bad.join("; "))))
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(failure) => {
            let err = serde_json::json!({
                "error": failure.kind(),
                "message": failure.message(),
            });
            eprintln!("{err}");
            std::process::exit(failure.exit_code());
        }
    }
}
