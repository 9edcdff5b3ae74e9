//! `piezobridge`: bridge-configuration error budgets from the command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use piezobridge_core::error_budget::offset::MIN_SAMPLES;
use piezobridge_core::report::{self, parse_config, RunConfig, Table};

#[derive(Debug, Parser)]
#[command(
    name = "piezobridge",
    version,
    about = "Error budgets for piezoresistive two-axis accelerometer bridges"
)]
struct Cli {
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write CSV here; a text table then goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Monte Carlo seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo sample count (overrides the config file).
    #[arg(long, global = true)]
    samples: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Numeric vs closed-form sensitivity matrices W.
    Linearize,
    /// Worst-direction bridge nonlinearity and oracle agreement.
    Nonlinearity,
    /// Offset variance under resistor mismatch (closed form and Monte Carlo).
    Offset,
    /// Acceleration-noise PSD matrices.
    Noise,
    /// Sensitivity angle minimizing the worst-direction noise.
    OptimizeAlpha,
    /// Data series behind a figure (3 to 7).
    Figure {
        /// Figure number, 3 to 7
        number: u32,
    },
    /// Full error budget for every configuration.
    Report,
}

/// Input problems that map to exit code 2.
#[derive(Debug)]
struct ValidationError(String);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).map_err(|e| ValidationError(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = cli.samples {
        if samples < MIN_SAMPLES {
            return Err(
                ValidationError(format!("--samples must be at least {MIN_SAMPLES}")).into(),
            );
        }
        cfg.samples = samples;
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    let validate = |r: piezobridge_core::Result<Table>| {
        r.map_err(|e| anyhow::Error::from(ValidationError(e.to_string())))
    };
    let table = match cli.command {
        Command::Linearize => validate(report::linearize_table(&cfg))?,
        Command::Nonlinearity => validate(report::nonlinearity_table(&cfg))?,
        Command::Offset => validate(report::offset_table(&cfg))?,
        Command::Noise => validate(report::noise_table(&cfg))?,
        Command::OptimizeAlpha => validate(report::optimize_table(&cfg))?,
        Command::Figure { number } => validate(report::reproduce_figure(number, &cfg))?,
        Command::Report => validate(report::run_report(&cfg).map(|b| b.to_table()))?,
    };

    match &cfg.output {
        Some(path) => {
            fs::write(path, table.to_csv())
                .with_context(|| format!("writing {}", path.display()))?;
            print!("{}", table.to_text());
        }
        None => print!("{}", table.to_csv()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<ValidationError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
