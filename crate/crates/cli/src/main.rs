use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gfactor_cli::{emit_report, output_path, run, RunConfig, EXIT_CHECK_FAILED, EXIT_USAGE, OUTPUT_DIR_ENV};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let outcome = match run(&config) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("gfactor: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let path = output_path(&config, env_dir.as_deref());
    if let Err(e) = emit_report(&outcome.doc, config.format, path.as_deref()) {
        eprintln!("gfactor: {e}");
        return ExitCode::from(EXIT_CHECK_FAILED as u8);
    }
    for c in outcome.doc.checks.iter().filter(|c| !c.pass) {
        eprintln!("gfactor: check failed: {}: {}", c.name, c.detail);
    }
    ExitCode::from(outcome.exit as u8)
}
