//! Batch experiment runner: reads a flat key=value config, runs one
//! experiment, writes `<experiment>.csv` and `summary.json`, and exits
//! nonzero if a declared threshold fails.

mod config;
mod experiments;
mod rng;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "kg1d", about = "Klein-Gordon dispersive-decay experiments")]
struct Cli {
    /// Path to the key=value config file
    #[arg(long)]
    config: PathBuf,

    /// Output directory (overrides the config's out_dir)
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Override a config key, e.g. --override sigma=1.5 (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Print progress to stderr
    #[arg(long)]
    verbose: bool,
}

#[derive(Serialize)]
struct Summary {
    experiment: String,
    config_echo: BTreeMap<String, String>,
    results: Vec<serde_json::Value>,
    pass: bool,
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let cfg = config::load(&cli.config, &cli.overrides)?;
    let out_dir = cli
        .out_dir
        .unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create out dir {}", out_dir.display()))?;
    if cli.verbose {
        eprintln!("running {} into {}", cfg.experiment, out_dir.display());
    }
    let outcome = experiments::run(&cfg, cli.verbose)?;
    let csv_path = out_dir.join(format!("{}.csv", cfg.experiment.name()));
    std::fs::write(&csv_path, &outcome.csv)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    let summary = Summary {
        experiment: cfg.experiment.name().to_string(),
        config_echo: cfg.echo.clone(),
        results: outcome.results,
        pass: outcome.pass,
    };
    let json_path = out_dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&json_path, text)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    if !outcome.pass {
        eprintln!(
            "{}: threshold failed; see {}",
            cfg.experiment,
            json_path.display()
        );
    } else if cli.verbose {
        eprintln!("{}: pass", cfg.experiment);
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
