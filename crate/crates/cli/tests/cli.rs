//! End-to-end tests of the `crosspanel` binary: exit codes, output files,
//! and byte-level determinism across reruns and thread counts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crosspanel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_fleet_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("fleet.json");
    fs::write(&path, body).unwrap();
    path
}

/// Small two-vendor fleet covering a full 24-month span.
fn synth_fixture(dir: &Path) -> PathBuf {
    let config = write_fleet_config(
        dir,
        r#"{"seed": 5, "days": 731, "vendors": 2, "noise_scale": 0.2,
            "coupling": [{"source": "post", "target": "search", "beta": 1.2}],
            "lag_days": 1}"#,
    );
    let csv = dir.join("fleet.csv");
    let output = run(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    csv
}

#[test]
fn synth_writes_ingestible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_fixture(dir.path());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("date,vendor_id,activity_type,count\n"));

    let check = run(&["ingest-check", "--input", csv.to_str().unwrap()]);
    assert_exit(&check, 0);
    let report: serde_json::Value = serde_json::from_slice(&check.stdout).expect("report is JSON");
    assert_eq!(report["panels_built"], 2);
    assert_eq!(report["rows_rejected"], 0);
}

#[test]
fn synth_missing_seed_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fleet_config(dir.path(), r#"{"days": 100}"#);
    let out_path = dir.path().join("out.csv");
    let output = run(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("missing field") && stderr.contains("seed"),
        "{stderr}"
    );
}

#[test]
fn synth_short_panel_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fleet_config(dir.path(), r#"{"seed": 1, "days": 20, "lag_days": 3}"#);
    let out_path = dir.path().join("out.csv");
    let output = run(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("lag_days + 30"));
}

/// The single `run-*` directory inside `out_dir`.
fn only_run_dir(out_dir: &Path) -> PathBuf {
    let runs: Vec<PathBuf> = fs::read_dir(out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(runs.len(), 1, "one run directory in {}", out_dir.display());
    let run_dir = runs.into_iter().next().unwrap();
    assert!(run_dir
        .file_name()
        .unwrap()
        .to_str()
        .unwrap()
        .starts_with("run-"));
    run_dir
}

#[test]
fn correlate_produces_pair_grid_and_rejects_window_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_fixture(dir.path());
    let out_dir = dir.path().join("corr");

    let bad = run(&[
        "correlate",
        "--input",
        csv.to_str().unwrap(),
        "--window",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_exit(&bad, 2);

    let ok = run(&[
        "correlate",
        "--input",
        csv.to_str().unwrap(),
        "--window",
        "30",
        "--max-lag",
        "15",
        "--threads",
        "2",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_exit(&ok, 0);
    let out_dir = only_run_dir(&out_dir);
    assert!(out_dir.join("manifest.json").exists());

    let matrices = fs::read_to_string(out_dir.join("next_day_matrices.csv")).unwrap();
    assert_eq!(matrices.lines().count(), 1 + 2 * 9, "2 vendors x 9 pairs");
    let lag_rows = fs::read_to_string(out_dir.join("lag_scan.csv")).unwrap();
    assert_eq!(lag_rows.lines().count(), 1 + 2 * 9 * 15);
    // The planted post->search lag of 1 day is the best lag for both vendors.
    for vendor in ["v01", "v02"] {
        let best: Vec<&str> = lag_rows
            .lines()
            .filter(|l| l.starts_with(&format!("{vendor},post,search,")) && l.ends_with(",1"))
            .collect();
        assert_eq!(best.len(), 1, "{vendor}: {best:?}");
        assert!(best[0].starts_with(&format!("{vendor},post,search,1,")));
    }
    assert!(
        fs::read_to_string(out_dir.join("rolling.csv"))
            .unwrap()
            .len()
            > 1000
    );
}

#[test]
fn features_exports_canonical_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_fixture(dir.path());
    let out_dir = dir.path().join("feat");
    let output = run(&[
        "features",
        "--input",
        csv.to_str().unwrap(),
        "--at",
        "2016-03-01",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let out_dir = only_run_dir(&out_dir);
    let text = fs::read_to_string(out_dir.join("features.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "header + one row per vendor");
    assert_eq!(lines[0].split(',').count(), 68);
}

fn tiny_run_config(dir: &Path) -> PathBuf {
    let path = dir.join("run.json");
    fs::write(
        &path,
        r#"{"master_seed": 11,
            "tasks": [{"epa_type": "order", "horizon_days": 1, "q": 3},
                      {"epa_type": "search", "horizon_days": 3, "q": 2}],
            "forest": {"n_trees": 4, "max_depth": 5, "min_samples_leaf": 2,
                       "features_per_split": 9, "bootstrap": true, "seed": 0},
            "logistic": {"learning_rate": 0.05, "epochs": 20, "l2": 0.001,
                         "seed": 0, "standardize": true}}"#,
    )
    .unwrap();
    path
}

#[test]
fn experiment_outputs_are_byte_identical_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_fixture(dir.path());
    let config = tiny_run_config(dir.path());

    let mut digests = Vec::new();
    for (out, threads) in [("exp1", "1"), ("exp2", "2"), ("exp3", "2")] {
        let out_dir = dir.path().join(out);
        let output = run(&[
            "experiment",
            "--input",
            csv.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
            "--threads",
            threads,
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert_exit(&output, 0);
        let run_dir = only_run_dir(&out_dir);
        let mut files: Vec<PathBuf> = fs::read_dir(&run_dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            [
                "manifest.json",
                "precision_3q_horizons.csv",
                "precision_5q_nextday.csv",
                "report.json",
                "top_features_3q_nextday.csv",
            ]
        );
        // The thread cap never reaches the outputs, manifest included.
        let digest: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    fs::read(p).unwrap(),
                )
            })
            .collect();
        digests.push(digest);
    }
    assert_eq!(digests[0], digests[1], "threads=1 vs threads=2");
    assert_eq!(digests[1], digests[2], "rerun with same seed");
}

#[test]
fn experiment_rejects_short_span() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fleet_config(dir.path(), r#"{"seed": 9, "days": 700, "vendors": 1}"#);
    let csv = dir.path().join("short.csv");
    assert_exit(
        &run(&[
            "synth",
            "--config",
            config.to_str().unwrap(),
            "--out",
            csv.to_str().unwrap(),
        ]),
        0,
    );

    let out_dir = dir.path().join("exp");
    let run_config = tiny_run_config(dir.path());
    // All units fail (23-month span), and no --allow-partial means exit 1.
    let output = run(&[
        "experiment",
        "--input",
        csv.to_str().unwrap(),
        "--config",
        run_config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_exit(&output, 1);
    assert!(String::from_utf8_lossy(&output.stderr).contains("units failed"));
}

#[test]
fn report_rerenders_tables_from_saved_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_fixture(dir.path());
    let config = tiny_run_config(dir.path());
    let out_dir = dir.path().join("exp");
    assert_exit(
        &run(&[
            "experiment",
            "--input",
            csv.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]),
        0,
    );
    let run_dir = fs::read_dir(&out_dir)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();

    let tables_dir = dir.path().join("tables");
    let report_path = run_dir.join("report.json");
    assert_exit(
        &run(&[
            "report",
            "--report",
            report_path.to_str().unwrap(),
            "--out-dir",
            tables_dir.to_str().unwrap(),
        ]),
        0,
    );
    for name in [
        "precision_5q_nextday.csv",
        "precision_3q_horizons.csv",
        "top_features_3q_nextday.csv",
    ] {
        let original = fs::read(run_dir.join(name)).unwrap();
        let rerendered = fs::read(tables_dir.join(name)).unwrap();
        assert_eq!(original, rerendered, "{name}");
    }
}

#[test]
fn unknown_flags_exit_two() {
    let output = run(&["correlate", "--nonsense"]);
    assert_exit(&output, 2);
}
