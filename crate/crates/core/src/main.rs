use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use channel_qubo::experiment::{run_experiment, sweep, RunConfig, SweepStatus};

/// Transient channel flow solved step by step as QUBO problems.
#[derive(Parser)]
#[command(name = "channel-qubo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its artifacts.
    Run(RunArgs),
    /// Run every (grid points, precision) combination.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated grid sizes, e.g. 5,6,7.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        grids: Vec<usize>,
        /// Comma-separated precisions, e.g. 2,4,8.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        precisions: Vec<u32>,
    },
}

/// Options shared by both commands. A `--config` file (key=value lines) is
/// read first; explicit flags override it.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    radix_pos: Option<i32>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    reads: Option<u64>,
    /// exhaustive or annealing
    #[arg(long)]
    sampler: Option<String>,
    /// lowest, mean, wmean, a comma list of those, or all
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    viscosity: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dpdx: Option<f64>,
    /// quantum (selected profile) or classical (double-precision profile)
    #[arg(long)]
    feed: Option<String>,
    #[arg(long)]
    sweeps: Option<usize>,
    /// Initial annealing temperature, or auto
    #[arg(long)]
    t0: Option<String>,
    /// Final annealing temperature, or auto
    #[arg(long)]
    t1: Option<String>,
    #[arg(long)]
    dump_limit: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let overrides: [(&str, Option<String>); 18] = [
            ("grid_points", self.grid_points.map(|v| v.to_string())),
            ("precision", self.precision.map(|v| v.to_string())),
            ("radix_pos", self.radix_pos.map(|v| v.to_string())),
            ("steps", self.steps.map(|v| v.to_string())),
            ("reads", self.reads.map(|v| v.to_string())),
            ("sampler", self.sampler),
            ("strategy", self.strategy),
            ("seed", self.seed.map(|v| v.to_string())),
            ("alpha", self.alpha.map(|v| format!("{v:?}"))),
            ("density", self.density.map(|v| format!("{v:?}"))),
            ("viscosity", self.viscosity.map(|v| format!("{v:?}"))),
            ("dpdx", self.dpdx.map(|v| format!("{v:?}"))),
            ("feed", self.feed),
            ("sweeps", self.sweeps.map(|v| v.to_string())),
            ("t0", self.t0),
            ("t1", self.t1),
            ("dump_limit", self.dump_limit.map(|v| v.to_string())),
            ("out", self.out.map(|p| p.to_string_lossy().into_owned())),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                cfg.set(key, &value)
                    .with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.into_config()?;
            let output = run_experiment(&cfg)?;
            for warning in &output.warnings {
                eprintln!("warning: {warning}");
            }
            for run in &output.runs {
                if let Some(last) = run.errors.last() {
                    println!(
                        "{:<7} step {:>3}  l2 {:.6e}  linf {:.6e}  chebyshev {:.6e}",
                        run.strategy, last.step, last.l2, last.linf, last.chebyshev
                    );
                }
            }
            println!("wrote {}", cfg.out_dir.display());
        }
        Command::Sweep {
            run,
            grids,
            precisions,
        } => {
            let cfg = run.into_config()?;
            let entries = sweep(&cfg, &grids, &precisions)?;
            for e in &entries {
                match e.status {
                    SweepStatus::Completed => {
                        println!(
                            "Ngp={:<3} n={:<2} size {:>3}  completed",
                            e.grid_points, e.precision, e.size
                        )
                    }
                    SweepStatus::Skipped => println!(
                        "Ngp={:<3} n={:<2} size {:>3}  skipped: {}",
                        e.grid_points, e.precision, e.size, e.reason
                    ),
                }
            }
            println!("wrote {}", cfg.out_dir.join("sweep_index.csv").display());
        }
    }
    Ok(())
}
