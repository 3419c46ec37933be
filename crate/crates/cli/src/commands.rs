//! Subcommand implementations.
//!
//! Every analysis command writes under a run-stamped directory: the stamp is
//! a digest of the command, its parameters, and the input bytes, so reruns
//! with identical inputs land on identical paths with identical bytes. A
//! `manifest.json` in each run directory records the parameters and crate
//! version that produced it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crosspanel::correlation::{lag_scan, next_day_matrix, rolling};
use crosspanel::error::Error;
use crosspanel::eval::{
    precision_3q_horizons_csv, precision_5q_nextday_csv, run_experiment, summary_text,
    top_features_csv, ExperimentConfig, ExperimentReport,
};
use crosspanel::export;
use crosspanel::ingest::{ingest_csv, LoadOptions};
use crosspanel::panel::{ActivityType, VendorPanel};
use crosspanel::rng::{hash_str, SplitMix64};
use crosspanel::synth::{generate_fleet, FleetConfig};
use crosspanel::Date;

use crate::IngestArgs;

type CmdResult = Result<ExitCode, Error>;

/// Config and usage faults exit 2; runtime faults exit 1.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Schema(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn load_panels(args: &IngestArgs) -> Result<Vec<VendorPanel>, Error> {
    let options = LoadOptions {
        strict: args.strict,
        aggregate_duplicates: args.aggregate_duplicates,
    };
    let (panels, report) = ingest_csv(&args.input, &options, args.policy.into())?;
    for (line, message) in &report.warnings {
        if *line > 0 {
            eprintln!("{}:{line}: {message}", args.input.display());
        } else {
            eprintln!("{}: {message}", args.input.display());
        }
    }
    if panels.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "{} contains no analyzable vendors",
            args.input.display()
        )));
    }
    Ok(panels.into_values().collect())
}

fn write(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Runs `work` inside a bounded thread pool when `--threads` was given.
/// Output bytes never depend on the pool size.
fn with_pool<T: Send>(threads: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T, Error> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    crate_version: &'a str,
    command: &'a str,
    input: String,
    params: serde_json::Value,
}

/// Creates `out_dir/run-<stamp>` and writes its manifest; the stamp digests
/// the command, parameters, and input bytes.
fn stamped_run_dir(
    out_dir: &Path,
    command: &str,
    input: &Path,
    params: serde_json::Value,
) -> Result<PathBuf, Error> {
    let input_bytes = fs::read_to_string(input)?;
    let stamp = SplitMix64::keyed(
        hash_str(command),
        &[hash_str(&params.to_string()), hash_str(&input_bytes)],
    )
    .next_u64();
    let run_dir = out_dir.join(format!("run-{stamp:016x}"));
    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION"),
        command,
        input: input.display().to_string(),
        params,
    };
    write(
        &run_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(run_dir)
}

fn ingest_params(args: &IngestArgs) -> serde_json::Value {
    json!({
        "strict": args.strict,
        "aggregate_duplicates": args.aggregate_duplicates,
        "policy": format!("{:?}", args.policy),
    })
}

pub fn synth(config_path: &Path, out: &Path) -> CmdResult {
    let text = fs::read_to_string(config_path)?;
    let config: FleetConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let panels = generate_fleet(&config)?;
    let mut records = Vec::new();
    for panel in &panels {
        records.extend(crosspanel::ingest::panel_to_records(panel));
    }
    write(out, &crosspanel::ingest::records_to_csv(&records))?;
    for panel in &panels {
        let totals: BTreeMap<&str, u64> = ActivityType::ALL
            .iter()
            .map(|&t| (t.as_str(), panel.series(t).values().iter().sum()))
            .collect();
        println!(
            "{} [{}] {}: {:?}",
            panel.vendor_id(),
            panel.category(),
            panel.range(),
            totals
        );
    }
    println!(
        "wrote {} rows for {} vendors to {}",
        records.len(),
        panels.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn ingest_check(args: &IngestArgs) -> CmdResult {
    let options = LoadOptions {
        strict: args.strict,
        aggregate_duplicates: args.aggregate_duplicates,
    };
    let (_, report) = ingest_csv(&args.input, &options, args.policy.into())?;
    println!("{}", report.to_json()?);
    Ok(ExitCode::SUCCESS)
}

pub fn correlate(
    args: &IngestArgs,
    window: usize,
    max_lag: usize,
    threads: Option<usize>,
    out_dir: &Path,
) -> CmdResult {
    if window < 2 {
        return Err(Error::Config(format!(
            "window must be at least 2 days, got {window}"
        )));
    }
    if max_lag < 1 {
        return Err(Error::Config(format!(
            "max-lag must be at least 1, got {max_lag}"
        )));
    }
    let panels = load_panels(args)?;

    // One (matrix, rolling, lag) row block per vendor, computed in parallel
    // and concatenated in input order.
    let blocks = with_pool(threads, || {
        panels
            .par_iter()
            .map(|panel| -> Result<(String, String, String), Error> {
                let mut matrix_rows = String::new();
                let mut rolling_rows = String::new();
                let mut lag_rows = String::new();
                export::push_matrix_rows(
                    &mut matrix_rows,
                    panel.vendor_id(),
                    &next_day_matrix(panel)?,
                );
                for &sma in &ActivityType::SMA {
                    for &epa in &ActivityType::EPA {
                        let series = rolling(panel.series(sma), panel.series(epa), window, 1)?;
                        export::push_rolling_rows(
                            &mut rolling_rows,
                            panel.vendor_id(),
                            sma,
                            epa,
                            &series,
                        );
                        let scan = lag_scan(panel.series(sma), panel.series(epa), window, max_lag)?;
                        export::push_lag_summary_rows(
                            &mut lag_rows,
                            panel.vendor_id(),
                            sma,
                            epa,
                            &scan,
                        );
                    }
                }
                Ok((matrix_rows, rolling_rows, lag_rows))
            })
            .collect::<Result<Vec<_>, Error>>()
    })??;

    let mut matrices = format!("{}\n", export::CORRELATION_HEADER);
    let mut rolling_rows = format!("{}\n", export::CORRELATION_HEADER);
    let mut lag_rows = format!("{}\n", export::LAG_SUMMARY_HEADER);
    for (matrix_block, rolling_block, lag_block) in blocks {
        matrices.push_str(&matrix_block);
        rolling_rows.push_str(&rolling_block);
        lag_rows.push_str(&lag_block);
    }

    let mut params = ingest_params(args);
    params["window"] = json!(window);
    params["max_lag"] = json!(max_lag);
    let run_dir = stamped_run_dir(out_dir, "correlate", &args.input, params)?;
    write(&run_dir.join("next_day_matrices.csv"), &matrices)?;
    write(&run_dir.join("rolling.csv"), &rolling_rows)?;
    write(&run_dir.join("lag_scan.csv"), &lag_rows)?;
    println!(
        "correlated {} vendors x 9 pairs (window {window}, lags 1..{max_lag}) into {}",
        panels.len(),
        run_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn features(args: &IngestArgs, at: Option<Date>, out_dir: &Path) -> CmdResult {
    let panels = load_panels(args)?;
    let mut out = String::new();
    for (i, panel) in panels.iter().enumerate() {
        let csv = export::features_csv(panel, at)?;
        if i == 0 {
            out.push_str(&csv);
        } else {
            // Drop the repeated header.
            out.push_str(csv.split_once('\n').map(|(_, rest)| rest).unwrap_or(""));
        }
    }
    let mut params = ingest_params(args);
    params["at"] = json!(at.map(|d| d.to_string()));
    let run_dir = stamped_run_dir(out_dir, "features", &args.input, params)?;
    write(&run_dir.join("features.csv"), &out)?;
    println!(
        "wrote feature matrix for {} vendors to {}",
        panels.len(),
        run_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn experiment(
    args: &IngestArgs,
    config_path: Option<&Path>,
    seed: Option<u64>,
    threads: Option<usize>,
    allow_partial: bool,
    out_dir: &Path,
) -> CmdResult {
    let mut config: ExperimentConfig = match config_path {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    config.validate()?;

    let panels = load_panels(args)?;
    let report = with_pool(threads, || run_experiment(&panels, &config))??;

    let mut params = ingest_params(args);
    params["master_seed"] = json!(config.master_seed);
    params["config"] = serde_json::to_value(&config)?;
    let run_dir = stamped_run_dir(out_dir, "experiment", &args.input, params)?;
    write(&run_dir.join("report.json"), &report.to_json()?)?;
    write_tables(&report, &run_dir)?;
    print!("{}", summary_text(&report));
    println!("report written to {}", run_dir.display());

    let completed: usize = report
        .model_kinds
        .iter()
        .map(|&k| report.completed_units(k))
        .sum();
    if report.failed_units() > 0 {
        eprintln!("{} units failed", report.failed_units());
        if !(allow_partial && completed > 0) {
            return Ok(ExitCode::FAILURE);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_tables(report: &ExperimentReport, dir: &Path) -> Result<(), Error> {
    write(
        &dir.join("precision_5q_nextday.csv"),
        &precision_5q_nextday_csv(report),
    )?;
    write(
        &dir.join("precision_3q_horizons.csv"),
        &precision_3q_horizons_csv(report),
    )?;
    write(
        &dir.join("top_features_3q_nextday.csv"),
        &top_features_csv(report)?,
    )?;
    Ok(())
}

pub fn report(report_path: &Path, out_dir: &Path) -> CmdResult {
    let text = fs::read_to_string(report_path)?;
    let report = ExperimentReport::from_json(&text)?;
    write_tables(&report, out_dir)?;
    print!("{}", summary_text(&report));
    println!("tables written to {}", out_dir.display());
    Ok(ExitCode::SUCCESS)
}
