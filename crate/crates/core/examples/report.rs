//! Runs every command on a configuration and prints the verdicts, as the
//! `sympext` binary would.
//!
//! `cargo run --example report -- [config] [key=value ...]`

use std::path::PathBuf;

use sympext::config::load_config;
use sympext::report::{config_failure, run, Command};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/e2.json"), PathBuf::from);
    let overrides: Vec<String> = args.collect();
    for command in Command::ALL {
        let report = match load_config(&path, &overrides) {
            Ok(cfg) => run(command, &cfg, None),
            Err(e) => config_failure(command, &e),
        };
        println!("{command:<13} exit {}", report.exit_code);
        for v in &report.verdicts {
            let value = v.value.map_or("-".into(), |x| format!("{x:.2e}"));
            println!("  {:<4} {:<28} {value:>9} (tol {:.0e})", if v.passed { "ok" } else { "FAIL" }, v.name, v.tolerance);
        }
        for w in &report.warnings {
            println!("  warning: {w}");
        }
        if let Some(e) = &report.error {
            println!("  error {}: {}", e.kind, e.message);
        }
    }
}
