//! `crosspanel`: batch pipeline over vendor activity panels.
//!
//! Subcommands mirror the pipeline stages: `synth` emits synthetic data in
//! the ingest schema, `ingest-check` validates a CSV, `correlate` runs the
//! correlation scans, `features` exports feature matrices, `experiment` runs
//! the cross-validated prediction grid, and `report` re-renders tables from
//! a saved report. Exit codes: 0 success, 1 runtime failure, 2 usage or
//! config error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crosspanel::panel::FillPolicy;

#[derive(Parser)]
#[command(
    name = "crosspanel",
    version,
    about = "Cross-platform activity panel analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    ZeroFill,
    Strict,
}

impl From<PolicyArg> for FillPolicy {
    fn from(value: PolicyArg) -> Self {
        match value {
            PolicyArg::ZeroFill => FillPolicy::ZeroFill,
            PolicyArg::Strict => FillPolicy::Strict,
        }
    }
}

#[derive(clap::Args, Clone)]
struct IngestArgs {
    /// Input CSV in the canonical `date,vendor_id,activity_type,count` schema.
    #[arg(long, short)]
    input: PathBuf,
    /// Abort on the first malformed row instead of rejecting it.
    #[arg(long)]
    strict: bool,
    /// Sum duplicate (date, vendor, type) rows instead of failing.
    #[arg(long)]
    aggregate_duplicates: bool,
    /// How to reconcile streams with differing date ranges.
    #[arg(long, value_enum, default_value = "zero-fill")]
    policy: PolicyArg,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic vendor panels as ingest-schema CSV.
    Synth {
        /// Fleet config JSON (seed and days required).
        #[arg(long, short)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Load and validate a CSV, printing the ingest report as JSON.
    IngestCheck {
        #[command(flatten)]
        ingest: IngestArgs,
    },
    /// Next-day matrices, rolling correlations, and lag scans per vendor.
    Correlate {
        #[command(flatten)]
        ingest: IngestArgs,
        /// Rolling window length in days.
        #[arg(long, default_value_t = 30)]
        window: usize,
        /// Largest SMA-leads-EPA shift to scan.
        #[arg(long, default_value_t = 15)]
        max_lag: usize,
        /// Worker thread cap (output bytes do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Export canonical 66-column feature matrices.
    Features {
        #[command(flatten)]
        ingest: IngestArgs,
        /// Single prediction day (default: every eligible day).
        #[arg(long)]
        at: Option<crosspanel::Date>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the cross-validated prediction grid and write report + tables.
    Experiment {
        #[command(flatten)]
        ingest: IngestArgs,
        /// Run config JSON (tasks, model kinds, hyperparameters, seed);
        /// defaults to the full grid with both models.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker thread cap (output bytes do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
        /// Exit 0 as long as at least one unit succeeded.
        #[arg(long)]
        allow_partial: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Re-render the CSV tables from a saved report JSON.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth { config, out } => commands::synth(&config, &out),
        Command::IngestCheck { ingest } => commands::ingest_check(&ingest),
        Command::Correlate {
            ingest,
            window,
            max_lag,
            threads,
            out_dir,
        } => commands::correlate(&ingest, window, max_lag, threads, &out_dir),
        Command::Features {
            ingest,
            at,
            out_dir,
        } => commands::features(&ingest, at, &out_dir),
        Command::Experiment {
            ingest,
            config,
            seed,
            threads,
            allow_partial,
            out_dir,
        } => commands::experiment(
            &ingest,
            config.as_deref(),
            seed,
            threads,
            allow_partial,
            &out_dir,
        ),
        Command::Report { report, out_dir } => commands::report(&report, &out_dir),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(commands::exit_code_for(&err))
        }
    }
}
