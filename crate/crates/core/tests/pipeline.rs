//! Cross-module integration: synthetic data through CSV, ingestion,
//! correlation, labeling, and a small cross-validated experiment.

use std::io::Write;

use crosspanel::correlation::next_day_matrix;
use crosspanel::date::DateRange;
use crosspanel::eval::{run_experiment, ExperimentConfig};
use crosspanel::ingest::{ingest_csv, panel_to_records, records_to_csv, LoadOptions};
use crosspanel::labeling::{build_dataset, PredictionTask, SchemeMode};
use crosspanel::learn::{train_forest, ForestConfig, LogisticConfig, ModelKind};
use crosspanel::panel::{ActivityType, FillPolicy};
use crosspanel::synth::{generate_fleet, Coupling, FleetConfig};
use crosspanel::VendorPanel;

fn range(start: &str, end: &str) -> DateRange {
    DateRange::new(start.parse().unwrap(), end.parse().unwrap()).unwrap()
}

fn fixture_fleet() -> Vec<VendorPanel> {
    generate_fleet(&FleetConfig {
        noise_scale: 0.2,
        lag_days: 1,
        coupling: vec![
            Coupling {
                source: ActivityType::Post,
                target: ActivityType::Search,
                beta: 1.2,
            },
            Coupling {
                source: ActivityType::Comment,
                target: ActivityType::Order,
                beta: 1.0,
            },
            Coupling {
                source: ActivityType::Post,
                target: ActivityType::Repost,
                beta: 5.0,
            },
            Coupling {
                source: ActivityType::Post,
                target: ActivityType::Comment,
                beta: 8.0,
            },
        ],
        ..FleetConfig::new(77, 3, 731)
    })
    .unwrap()
}

fn fleet_csv(fleet: &[VendorPanel]) -> tempfile::NamedTempFile {
    let mut records = Vec::new();
    for panel in fleet {
        records.extend(panel_to_records(panel));
    }
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(records_to_csv(&records).as_bytes()).unwrap();
    file
}

#[test]
fn csv_round_trip_preserves_every_panel() {
    let fleet = fixture_fleet();
    let file = fleet_csv(&fleet);
    let (panels, report) =
        ingest_csv(file.path(), &LoadOptions::default(), FillPolicy::ZeroFill).unwrap();
    assert_eq!(report.panels_built, fleet.len());
    assert_eq!(report.rows_rejected, 0);
    for panel in &fleet {
        assert_eq!(&panels[panel.vendor_id()], panel);
    }
}

#[test]
fn planted_coupling_is_visible_after_round_trip() {
    let fleet = fixture_fleet();
    let file = fleet_csv(&fleet);
    let (panels, _) =
        ingest_csv(file.path(), &LoadOptions::default(), FillPolicy::ZeroFill).unwrap();
    for panel in panels.values() {
        let matrix = next_day_matrix(panel).unwrap();
        let planted = matrix
            .get(ActivityType::Post, ActivityType::Search)
            .unwrap();
        assert!(
            planted > 0.3,
            "{}: post->search r = {planted}",
            panel.vendor_id()
        );
    }
}

#[test]
fn labeled_datasets_feed_models_end_to_end() {
    let fleet = fixture_fleet();
    let panel = &fleet[0];
    let task = PredictionTask::new(ActivityType::Order, 1, 3).unwrap();

    let train = build_dataset(
        panel,
        &task,
        &range("2016-01-01", "2016-12-31"),
        SchemeMode::Fit,
    )
    .unwrap();
    let test = build_dataset(
        panel,
        &task,
        &range("2017-01-01", "2017-01-31"),
        SchemeMode::Use(train.scheme.clone()),
    )
    .unwrap();
    let x: Vec<Vec<f64>> = train
        .examples
        .iter()
        .map(|e| e.features.values().to_vec())
        .collect();
    let y: Vec<usize> = train.examples.iter().map(|e| e.label).collect();

    let forest = train_forest(
        &x,
        &y,
        3,
        &ForestConfig {
            n_trees: 20,
            ..Default::default()
        },
    )
    .unwrap();
    let hits = test
        .examples
        .iter()
        .filter(|e| forest.predict(&e.features).unwrap().0 == e.label)
        .count();
    // Next-day orders on coupled synthetic data sit far above the 1/3
    // baseline.
    assert!(
        hits as f64 / test.examples.len() as f64 > 0.5,
        "accuracy {hits}/{}",
        test.examples.len()
    );
}

#[test]
fn experiment_report_survives_json_round_trip() {
    let fleet = fixture_fleet();
    let config = ExperimentConfig {
        tasks: vec![
            PredictionTask::new(ActivityType::Order, 1, 3).unwrap(),
            PredictionTask::new(ActivityType::Search, 7, 5).unwrap(),
        ],
        forest: ForestConfig {
            n_trees: 5,
            max_depth: 5,
            ..Default::default()
        },
        logistic: LogisticConfig {
            epochs: 20,
            ..Default::default()
        },
        master_seed: 99,
        ..Default::default()
    };
    let report = run_experiment(&fleet, &config).unwrap();
    assert_eq!(report.completed_units(ModelKind::Forest), 6);
    assert_eq!(report.completed_units(ModelKind::Logistic), 6);

    let json = report.to_json().unwrap();
    let restored = crosspanel::eval::ExperimentReport::from_json(&json).unwrap();
    assert_eq!(report, restored);
    assert_eq!(json, restored.to_json().unwrap());
}
