use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sympext::config::load_config;
use sympext::report::{config_failure, run, Command, EXIT_CONFIG};

/// Runs one analysis step on a discrete symplectic system and prints a JSON report.
#[derive(Parser)]
#[command(name = "sympext", version)]
struct Cli {
    /// validate, atkinson, solve, disconjugacy, recessive, classify, friedrichs or membership
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV sequence dumps.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` with a dotted key; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let mut overrides = cli.overrides;
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    let report = match load_config(&cli.config, &overrides) {
        Ok(cfg) => run(cli.command, &cfg, cli.csv.as_deref()),
        Err(e) => config_failure(cli.command, &e),
    };
    println!("{}", report.to_json());
    ExitCode::from(report.exit_code as u8)
}
