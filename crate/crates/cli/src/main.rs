use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use arl_cli::commands::{self, Report};
use arl_cli::file::load_path;
use arl_cli::CliError;
use arl_core::suites::Suite;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "arl",
    version,
    about = "Artin-Rees l-adic systems: normal forms, limits and property suites"
)]
struct Cli {
    /// Search bound for shifts and stabilization indices
    #[arg(long, global = true, env = "ARL_DEFAULT_BOUND", default_value_t = 8)]
    bound: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Target {
    /// Tower description file (.arl.json)
    #[arg(long)]
    file: PathBuf,
    /// Tower name inside the file
    #[arg(long)]
    tower: String,
    /// Number of levels to print
    #[arg(long, default_value_t = 6)]
    levels: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical l-adic replacement with its certificates
    Normalize(Target),
    /// Inverse limit as a Z_l-module
    Limit(Target),
    /// Normal form of the image-quotient functor at an infinite index
    Upsilon {
        #[command(flatten)]
        target: Target,
        /// Infinite index, e.g. `h`, `h-1`, `h+d1`
        #[arg(long)]
        h: String,
    },
    /// The l-adic tower recovered from the upsilon object
    Psi {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        h: String,
    },
    /// Run a randomized property suite
    Verify {
        #[arg(long, required_unless_present = "replay", value_parser = parse_suite)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: u64,
        /// Explicit levels of generated towers
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Re-check a saved report instead of generating a new one
        #[arg(long, conflicts_with = "suite")]
        replay: Option<PathBuf>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: arl_core::Error| e.to_string())
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let bound = cli.bound;
    match cli.command {
        Command::Normalize(t) => {
            commands::normalize(&load_path(&t.file)?, &t.tower, t.levels, bound)
        }
        Command::Limit(t) => commands::limit_cmd(&load_path(&t.file)?, &t.tower, bound),
        Command::Upsilon { target: t, h } => {
            commands::upsilon_cmd(&load_path(&t.file)?, &t.tower, &h, t.levels, bound)
        }
        Command::Psi { target: t, h } => {
            commands::psi_cmd(&load_path(&t.file)?, &t.tower, &h, t.levels, bound)
        }
        Command::Verify {
            replay: Some(path), ..
        } => commands::verify_replay(&path),
        Command::Verify {
            suite,
            seed,
            cases,
            levels,
            ..
        } => commands::verify(
            suite.expect("clap requires a suite"),
            seed,
            cases,
            levels,
            bound,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli) {
        Ok(report) => {
            print!("{}", report.render());
            eprintln!("{}", report.summary);
            // timing goes to stderr so stdout stays reproducible
            eprintln!("timing: {:.3}s", start.elapsed().as_secs_f64());
            ExitCode::from(report.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
