//! Thin command-line front end: argument parsing and exit-code mapping only.
//! All behavior lives in the library (`heavytail::cli`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heavytail::cli::{self, ExperimentConfig, TheoremId};
use heavytail::Result;

#[derive(Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Certified tails and class diagnostics for randomly stopped maxima and sums",
    long_about = "Certified tails and class diagnostics for randomly stopped maxima, sums, \
                  and maxima of sums of independent (not necessarily identically \
                  distributed) components.\n\nExit codes: 0 success, 1 configuration or \
                  I/O error, 2 numeric non-convergence, 3 hypothesis check failed, \
                  4 hypothesis check inconclusive.\n\nSet HEAVYTAIL_THREADS to cap Monte \
                  Carlo workers; results never depend on it."
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified tail brackets over the configured x list (plus Monte Carlo
    /// cross-check rows when the sample budget is positive).
    Tail {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Override the Monte Carlo seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the Monte Carlo sample budget (0 disables the cross-check).
        #[arg(long)]
        samples: Option<u64>,
        /// Directory for tail.csv / tail.json artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heavy-tail class indicators and index estimates for every distinct
    /// component law.
    Diagnose {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Directory for diagnosis.csv / diagnosis.json artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the hypotheses of one closure result against the config.
    Check {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Which result to check: 1, 2, 3, 4, 5, cor1, or cor2.
        #[arg(long)]
        theorem: String,
        /// Directory for the check.json artifact.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a built-in worked example end to end, writing every artifact.
    Reproduce {
        /// Built-in example id (1 or 2).
        example: u32,
        /// Override the Monte Carlo seed baked into the example.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: reproduce-example<N>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimates only, one row per configured x.
    Mc {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Override the Monte Carlo seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the Monte Carlo sample budget.
        #[arg(long)]
        samples: Option<u64>,
        /// Directory for mc.csv / mc.json artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Path, seed: Option<u64>, samples: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = seed {
        config.mc.seed = seed;
    }
    if let Some(samples) = samples {
        config.mc.samples = samples;
        if samples > 0 {
            config.mc.validate()?;
        }
    }
    Ok(config)
}

fn run(args: Args) -> Result<i32> {
    match args.command {
        Command::Tail {
            config,
            seed,
            samples,
            out,
        } => {
            let config = load_config(&config, seed, samples)?;
            cli::cmd_tail(&config, out.as_deref())
        }
        Command::Diagnose { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            cli::cmd_diagnose(&config, out.as_deref())
        }
        Command::Check {
            config,
            theorem,
            out,
        } => {
            let theorem = TheoremId::parse(&theorem)?;
            let config = ExperimentConfig::load(&config)?;
            cli::cmd_check(&config, theorem, out.as_deref())
        }
        Command::Reproduce { example, seed, out } => {
            let out = out.unwrap_or_else(|| PathBuf::from(format!("reproduce-example{example}")));
            cli::cmd_reproduce(example, seed, &out)
        }
        Command::Mc {
            config,
            seed,
            samples,
            out,
        } => {
            let config = load_config(&config, seed, samples)?;
            cli::cmd_mc(&config, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match run(args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            cli::error_exit_code(&err)
        }
    };
    ExitCode::from(code as u8)
}
