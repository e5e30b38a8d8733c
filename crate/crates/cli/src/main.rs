use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use shearspec_core::harness::{self, RunConfig, Scenario};

/// Frequency-space simulator for linearized compressible shear flows.
#[derive(Parser, Debug)]
#[command(name = "shearspec", version)]
struct Cli {
    /// couette, shear, block1, block2, toy, zeromode, weights-audit or sweep
    scenario: String,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the data seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let scenario: Scenario = match cli.scenario.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("usage: shearspec <scenario> --config <path> [--out <dir>] [--seed <n>]");
            return ExitCode::from(2);
        }
    };
    let mut cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: config {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    cfg.scenario = scenario;
    if let Some(s) = cli.seed {
        cfg.data.seed = s;
    }
    match harness::run(&cfg, &cli.out) {
        Ok(o) => {
            println!("{}: {} ({}, {})", scenario, if o.passed { "invariants hold" } else { "invariant violated" }, o.csv.display(), o.json.display());
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {scenario}: {e}");
            ExitCode::from(3)
        }
    }
}
