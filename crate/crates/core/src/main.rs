use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use frac_hardy::cli::{compare_runs, run_experiment, ExperimentConfig, RunOptions};
use frac_hardy::Error;

#[derive(Parser)]
#[command(
    name = "frac-hardy",
    version,
    about = "Kernel checks, mild-solution runs and regime studies"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Output directory (run) or report directory (compare).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent sweep points.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Treat warnings as failures.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Diff the CSV artifacts of two completed runs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn report(e: &Error) -> ExitCode {
    let body = serde_json::json!({
        "error": e.code(),
        "invariant": e.invariant(),
        "message": e.to_string(),
    });
    eprintln!("{body}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Validate { config } => match ExperimentConfig::load(&config).and_then(|c| c.validate().map(|_| c)) {
            Ok(c) => {
                println!(
                    "{} ({}) is valid, hash {}",
                    c.name,
                    c.experiment.kind(),
                    c.hash().unwrap_or_default()
                );
                ExitCode::SUCCESS
            }
            Err(e) => report(&e),
        },
        Command::Run { config } => {
            let opts = RunOptions {
                out: args.out,
                workers: args.workers,
                seed: args.seed,
                strict: args.strict,
            };
            let manifest = match ExperimentConfig::load(&config).and_then(|c| run_experiment(&c, &opts)) {
                Ok(m) => m,
                Err(e) => return report(&e),
            };
            for c in &manifest.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for w in &manifest.warnings {
                println!("WARN {w}");
            }
            if manifest.passed {
                ExitCode::SUCCESS
            } else {
                for c in manifest.failing() {
                    eprintln!("failed invariant: {}", c.name);
                }
                if args.strict && !manifest.warnings.is_empty() {
                    eprintln!("{} warnings under --strict", manifest.warnings.len());
                }
                ExitCode::FAILURE
            }
        }
        Command::Compare { a, b, tolerance } => {
            let cmp = match compare_runs(&a, &b, tolerance) {
                Ok(c) => c,
                Err(e) => return report(&e),
            };
            let text = serde_json::to_string_pretty(&cmp).expect("comparison serializes");
            match args.out {
                Some(dir) => {
                    let path = dir.join("comparison.json");
                    if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(&path, &text)) {
                        return report(&Error::from(e));
                    }
                    println!("{}", path.display());
                }
                None => println!("{text}"),
            }
            println!(
                "identical: {}, converged: {}, divergence consistent: {}",
                cmp.identical, cmp.converged, cmp.divergence_consistent
            );
            if args.strict && !cmp.converged {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
