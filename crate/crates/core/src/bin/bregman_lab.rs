//! Command-line front end: run a scenario (file path or built-in name),
//! validate a config without running it, or list the built-in scenarios.
//!
//! Exit codes: 0 when every run met its expectation, 1 when at least one
//! run did not, 2 on any error (bad config, infeasible search, I/O).

use bregman_lab::scenario::run::{run_scenario, write_artifacts, OutputFormat};
use bregman_lab::scenario::{load_config, prepare, BUILTIN_SCENARIOS};
use bregman_lab::Result;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bregman-lab",
    version,
    about = "Numerical laboratory for divergence-based cyclic iteration experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and print one PASS/FAIL line per run.
    Run {
        /// Path to a scenario JSON file, or the name of a built-in scenario.
        #[arg(long)]
        config: String,
        /// Directory for report.json and the CSV tables (created if missing).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Which artifacts to write into --out.
        #[arg(long, value_enum, default_value_t = FormatArg::Both, requires = "out")]
        format: FormatArg,
    },
    /// Parse and semantically validate a scenario without running it.
    Validate {
        /// Path to a scenario JSON file, or the name of a built-in scenario.
        #[arg(long)]
        config: String,
    },
    /// List the built-in scenarios with one-line descriptions.
    ListExamples,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Both => OutputFormat::Both,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            format,
        } => {
            let prepared = prepare(load_config(&config)?)?;
            let artifacts = run_scenario(&prepared, seed)?;
            for run in &artifacts.report.runs {
                let verdict = if run.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {} [{}]", run.name, run.kind);
            }
            let total = artifacts.report.runs.len();
            let passed = artifacts.report.runs.iter().filter(|r| r.passed).count();
            println!(
                "scenario {}: {passed}/{total} runs met expectations (seed {}, {} ms)",
                artifacts.report.scenario, artifacts.report.seed, artifacts.report.wall_time_ms
            );
            if let Some(dir) = out {
                let written = write_artifacts(&artifacts, &dir, format.into())?;
                println!("wrote {} file(s) under {}", written.len(), dir.display());
            }
            Ok(if artifacts.report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Validate { config } => {
            let prepared = prepare(load_config(&config)?)?;
            println!(
                "ok: scenario `{}` ({} sets, dimension {}, {} runs)",
                prepared.config.name,
                prepared.system.p(),
                prepared.handle.dim(),
                prepared.config.runs.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ListExamples => {
            for (name, _, blurb) in BUILTIN_SCENARIOS {
                println!("{name:<14} {blurb}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
