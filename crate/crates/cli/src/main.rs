//! `iumps`: transfer spectra, decay scans, ensembles, bounds and the
//! built-in benchmark from the command line.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iumps_core::mps::benchmark_mutual_information;

use config::{CaseArg, RunConfig};
use error::{CliError, EXIT_INPUT};

#[derive(Debug, Parser)]
#[command(name = "iumps", version, about = "Infinite uniform MPS experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

/// Overrides applied on top of the defaults and the config file.
#[derive(Debug, clap::Args)]
struct Flags {
    /// Flat JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// 1, 2, 3 or bench.
    #[arg(long = "case", global = true)]
    case_tag: Option<CaseArg>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "b-max", global = true)]
    b_max: Option<usize>,
    #[arg(long, global = true)]
    k: Option<u32>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Explicit Kraus set in JSON, used instead of a sampled case.
    #[arg(long, global = true)]
    kraus: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer-matrix spectra: spectrum.csv and gap.json.
    Spectrum,
    /// Decay curves: curve_<id>.csv.
    Scan,
    /// Ensemble statistics: rates, histogram, CDFs and summary.json.
    Ensemble,
    /// Run the built-in benchmark checks.
    Benchmark {
        /// Reference mutual information to compare against.
        #[arg(long, hide = true)]
        reference_qmi: Option<f64>,
    },
    /// Bound constants and the sufficient |B|, as JSON on stdout.
    Bound,
    /// Spectral gap statistics of Haar samples and the analytic families.
    Gapstats,
}

fn resolve(flags: &Flags) -> Result<RunConfig, CliError> {
    let mut c = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = flags.seed {
        c.master_seed = v;
    }
    if let Some(v) = flags.case_tag {
        c.case_tag = v;
    }
    if let Some(v) = flags.n {
        c.n_instances = Some(v);
    }
    if let Some(v) = flags.b_max {
        c.b_max_limit = v;
    }
    if let Some(v) = flags.k {
        c.k = v;
    }
    if let Some(v) = flags.jobs {
        c.jobs = v;
    }
    if let Some(v) = &flags.out {
        c.output_dir = v.clone();
    }
    if let Some(v) = &flags.kraus {
        c.kraus_path = Some(v.clone());
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let config = resolve(&cli.flags)?;
    match &cli.command {
        Command::Spectrum => commands::spectrum(&config),
        Command::Scan => commands::scan(&config),
        Command::Ensemble => commands::ensemble(&config),
        Command::Benchmark { reference_qmi } => {
            commands::benchmark(reference_qmi.unwrap_or_else(benchmark_mutual_information))
        }
        Command::Bound => commands::bound(&config),
        Command::Gapstats => commands::gapstats(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
