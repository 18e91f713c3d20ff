//! Batch front end: compile target spin models into pulse schedules,
//! verify them by exact simulation and emit reports.

mod config;
mod scenario;
mod units;

use clap::{Parser, Subcommand};
use scenario::{run_scenario, write_artifacts, Stage};
use std::path::PathBuf;
use std::process::ExitCode;
use trapspin_core::constants::Constants;
use trapspin_core::schedule::PulseSchedule;

/// Environment variable pointing at a constants override table.
const CONSTANTS_ENV: &str = "TRAPSPIN_CONSTANTS";

#[derive(Parser)]
#[command(
    name = "trapspin",
    about = "Compile spin-model targets for trapped-electron arrays into pulse schedules and verify them by exact simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario config file.
    config: PathBuf,
    /// Output directory (default: `<config stem>.out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit non-zero if any evaluated check fails.
    #[arg(long)]
    strict: bool,
    /// Override the sweep-size cap from the config.
    #[arg(long)]
    max_n: Option<usize>,
    /// Assert that the run uses no randomness (it never does; the flag
    /// records the guarantee in the run output).
    #[arg(long)]
    seedless: bool,
    /// Constants override table (takes precedence over the environment).
    #[arg(long)]
    constants: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile the target and write the schedule file.
    Compile(RunArgs),
    /// Compile, run the verification sweeps, write tabular outputs.
    Verify(RunArgs),
    /// Verify plus a human-readable summary document.
    Report(RunArgs),
    /// Check that a schedule file parses and re-exports byte-identically.
    Roundtrip {
        /// Schedule file produced by `compile`.
        schedule: PathBuf,
    },
}

fn load_constants(flag: &Option<PathBuf>) -> Result<Constants, String> {
    let path = flag
        .clone()
        .or_else(|| std::env::var_os(CONSTANTS_ENV).map(PathBuf::from));
    match path {
        None => Ok(Constants::codata2018()),
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| format!("cannot read constants table {}: {e}", p.display()))?;
            Constants::from_table(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn run(args: &RunArgs, stage: Stage) -> ExitCode {
    let consts = match load_constants(&args.constants) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let cfg = match config::parse_scenario(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run_scenario(&cfg, &consts, stage, args.max_n) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out_dir = args.out.clone().unwrap_or_else(|| {
        let stem = args
            .config
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "scenario".into());
        PathBuf::from(format!("{stem}.out"))
    });
    match write_artifacts(&out_dir, &outcome.artifacts) {
        Ok(paths) => {
            println!("{}", outcome.summary_line);
            if args.seedless {
                println!("seedless: no randomness anywhere in the pipeline");
            }
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: cannot write outputs: {e}");
            return ExitCode::from(1);
        }
    }
    for c in &outcome.checks {
        println!(
            "[{}] {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if args.strict && !outcome.all_passed() {
        eprintln!("strict mode: at least one check failed");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn roundtrip(path: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(1);
        }
    };
    match PulseSchedule::parse(&text) {
        Ok(schedule) => {
            if schedule.export() == text {
                println!("round-trip ok: {} steps", schedule.steps.len());
                ExitCode::SUCCESS
            } else {
                eprintln!("error: re-export differs from the input bytes");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Compile(args) => run(args, Stage::Compile),
        Command::Verify(args) => run(args, Stage::Verify),
        Command::Report(args) => run(args, Stage::Report),
        Command::Roundtrip { schedule } => roundtrip(schedule),
    }
}
