// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use chronolab_cli::{catalog, check_experiment, load_config, run_experiment, CliError};
use clap::Parser;

/// Run a chronolab experiment described by a TOML config file.
#[derive(Parser, Debug)]
#[command(name = "chronolab", version, after_help = catalog_help())]
struct Cli {
    /// Experiment config file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the master seed of the config.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the output directory of the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for disorder ensembles; defaults to the available parallelism.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Re-run and verify the results against the manifest in the output directory.
    #[arg(long)]
    check: bool,
}

fn catalog_help() -> String {
    let mut s = String::from("Experiments:\n");
    for e in catalog::ALL {
        s.push_str(&format!("  {:<18} {}\n", e.name(), e.description()));
    }
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut config = load_config(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output = out.clone();
    }
    let workers = match cli.workers {
        Some(0) | None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        Some(n) => n,
    };
    if cli.check {
        let m = check_experiment(&config, workers)?;
        println!(
            "{}: {} artifacts verified in {}",
            config.experiment.name(),
            m.artifacts.len(),
            config.output.display()
        );
    } else {
        let m = run_experiment(&config, workers)?;
        println!(
            "{}: wrote {} artifacts to {} in {:.1} s",
            config.experiment.name(),
            m.artifacts.len(),
            config.output.display(),
            m.wall_clock_seconds
        );
    }
    Ok(())
}
