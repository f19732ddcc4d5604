//! `blowup` — scenario runner for the blow-up laboratory.
//!
//! Exit codes: 0 all assertions pass, 1 assertion failure, 2 configuration
//! error, 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blowup_cli::config::{self, ScenarioConfig};
use blowup_cli::runner::{run_scenario, Failure};
use blowup_cli::scenarios::catalog;

#[derive(Parser)]
#[command(name = "blowup", version, about = "Blow-up dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file or by built-in name.
    Run(RunArgs),
    /// List the built-in scenarios.
    List {
        /// Substring filter on scenario names.
        filter: Option<String>,
    },
    /// Parse and validate a config file without running it.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// Path to a config file, or a built-in scenario name.
    target: String,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid node count override.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Grid half-width override.
    #[arg(long)]
    half_width: Option<f64>,
    /// Integration horizon override.
    #[arg(long)]
    t_end: Option<f64>,
    /// Blow-up threshold override.
    #[arg(long)]
    threshold: Option<f64>,
    /// Seed override for perturbation scenarios.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker count override for the data-parallel right-hand side.
    #[arg(long)]
    workers: Option<usize>,
}

fn load_config(target: &str) -> Result<ScenarioConfig, Failure> {
    let path = PathBuf::from(target);
    if path.is_file() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::Config(format!("reading {}: {e}", path.display())))?;
        config::parse_text(&text).map_err(|e| Failure::Config(e.to_string()))
    } else {
        config::default_config(target).map_err(|e| {
            Failure::Config(format!(
                "'{target}' is neither a config file nor a known scenario: {e}"
            ))
        })
    }
}

fn apply_overrides(cfg: &mut ScenarioConfig, args: &RunArgs) {
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.display().to_string();
    }
    if let Some(n) = args.grid_n {
        cfg.grid.n_points = n;
    }
    if let Some(hw) = args.half_width {
        cfg.grid.half_width = hw;
    }
    if let Some(t) = args.t_end {
        cfg.solver.t_end = t;
    }
    if let Some(th) = args.threshold {
        cfg.solver.threshold = th;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(w) = args.workers {
        cfg.solver.workers = w;
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { filter } => {
            for entry in catalog() {
                if let Some(f) = &filter {
                    if !entry.name.contains(f.as_str()) {
                        continue;
                    }
                }
                println!("{}", entry.name);
                println!("    {}", entry.summary);
                println!("    verifies: {}", entry.verifies);
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config: path } => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: reading {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            match config::parse_text(&text) {
                Ok(cfg) => {
                    println!("ok: scenario '{}' valid", cfg.name);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Run(args) => {
            let mut cfg = match load_config(&args.target) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            apply_overrides(&mut cfg, &args);
            match run_scenario(&cfg) {
                Ok(report) => {
                    for a in &report.assertions {
                        println!(
                            "{} {} (measured {:.6e}, tolerance {:.1e}) — {}",
                            if a.passed { "pass" } else { "FAIL" },
                            a.name,
                            a.measured,
                            a.tolerance,
                            a.detail
                        );
                    }
                    println!(
                        "{}: {} in {:.2}s, artifacts in {}",
                        cfg.name,
                        if report.passed { "all assertions pass" } else { "assertion failure" },
                        report.wall_seconds,
                        cfg.output.dir
                    );
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(Failure::Config(m)) => {
                    eprintln!("error: configuration: {m}");
                    ExitCode::from(2)
                }
                Err(Failure::Runtime(m)) => {
                    eprintln!("error: runtime: {m}");
                    ExitCode::from(3)
                }
            }
        }
    }
}
