//! Full evaluation grid: vendors x tasks x model kinds x 12 folds.
//!
//! Units of work are independent and run in parallel; per-unit seeds derive
//! from `(master_seed, vendor, task, fold)` and results are assembled in a
//! fixed order, so the report is byte-identical regardless of thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::date::Date;
use crate::error::{Error, Result};
use crate::features::{build_features, earliest_valid_t_p, FeatureVector};
use crate::labeling::{build_dataset_with, Dataset, PredictionTask, SchemeMode};
use crate::learn::{
    train_forest, train_logistic, ForestConfig, LogisticConfig, ModelConfig, ModelKind,
};
use crate::panel::{ActivityType, VendorPanel};
use crate::rng::{hash_str, SplitMix64};

use super::folds::{make_folds, FoldSpec};
use super::metrics::{ConfusionMatrix, FoldResult};
use super::ttest::{paired_t_test, TTestResult};

/// Expected per-class precision of a uniform random predictor over `q`
/// balanced classes.
pub fn random_baseline(q: usize) -> f64 {
    debug_assert!(q >= 2);
    1.0 / q as f64
}

/// Pseudo-category aggregating every vendor.
pub const ALL_CATEGORIES: &str = "all";

/// Grid selection plus model hyperparameters for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "PredictionTask::full_grid")]
    pub tasks: Vec<PredictionTask>,
    #[serde(default = "default_model_kinds")]
    pub model_kinds: Vec<ModelKind>,
    #[serde(default)]
    pub forest: ForestConfig,
    #[serde(default)]
    pub logistic: LogisticConfig,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_model_kinds() -> Vec<ModelKind> {
    vec![ModelKind::Forest, ModelKind::Logistic]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tasks: PredictionTask::full_grid(),
            model_kinds: default_model_kinds(),
            forest: ForestConfig::default(),
            logistic: LogisticConfig::default(),
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::Config("no tasks selected".into()));
        }
        if self.model_kinds.is_empty() {
            return Err(Error::Config("no model kinds selected".into()));
        }
        Ok(())
    }

    /// Model config for one `(vendor, task, fold)` cell, seeded from the
    /// master seed.
    fn fold_model_config(
        &self,
        kind: ModelKind,
        vendor_id: &str,
        task: &PredictionTask,
        fold_index: usize,
    ) -> ModelConfig {
        let seed = SplitMix64::keyed(
            self.master_seed,
            &[
                hash_str(vendor_id),
                task.epa_type.index() as u64,
                task.q as u64,
                task.horizon_days as u64,
                kind as u64,
                fold_index as u64,
            ],
        )
        .next_u64();
        match kind {
            ModelKind::Forest => ModelConfig::Forest(ForestConfig {
                seed,
                ..self.forest
            }),
            ModelKind::Logistic => ModelConfig::Logistic(LogisticConfig {
                seed,
                ..self.logistic
            }),
        }
    }
}

fn dataset_matrix(dataset: &Dataset) -> (Vec<Vec<f64>>, Vec<usize>) {
    let x = dataset
        .examples
        .iter()
        .map(|e| e.features.values().to_vec())
        .collect();
    let y = dataset.examples.iter().map(|e| e.label).collect();
    (x, y)
}

/// Trains on the fold's training months, labels its test month with the
/// training-fitted scheme, and scores the predictions.
pub fn evaluate_fold(
    panel: &VendorPanel,
    task: &PredictionTask,
    fold: &FoldSpec,
    model_config: &ModelConfig,
) -> Result<FoldResult> {
    evaluate_fold_with(panel, task, fold, model_config, |t_p| {
        build_features(panel, t_p)
    })
}

fn evaluate_fold_with(
    panel: &VendorPanel,
    task: &PredictionTask,
    fold: &FoldSpec,
    model_config: &ModelConfig,
    features_at: impl Fn(Date) -> Result<FeatureVector>,
) -> Result<FoldResult> {
    if fold.train.end >= fold.test.start {
        return Err(Error::Range(format!(
            "fold {} leaks: train ends {} but test starts {}",
            fold.fold_index, fold.train.end, fold.test.start
        )));
    }
    let train = build_dataset_with(panel, task, &fold.train, SchemeMode::Fit, &features_at)?;
    let test = build_dataset_with(
        panel,
        task,
        &fold.test,
        SchemeMode::Use(train.scheme.clone()),
        &features_at,
    )?;

    let (x_train, y_train) = dataset_matrix(&train);
    let model = match model_config {
        ModelConfig::Forest(cfg) => train_forest(&x_train, &y_train, task.q, cfg)?,
        ModelConfig::Logistic(cfg) => train_logistic(&x_train, &y_train, task.q, cfg)?,
    };

    let mut truths = Vec::with_capacity(test.examples.len());
    let mut predictions = Vec::with_capacity(test.examples.len());
    for example in &test.examples {
        truths.push(example.label);
        predictions.push(model.predict_row(example.features.values())?.0);
    }
    let confusion = ConfusionMatrix::from_pairs(&truths, &predictions, task.q)?;

    let train_targets: Vec<f64> = train.examples.iter().map(|e| e.target_value).collect();
    Ok(FoldResult::from_confusion(
        fold.fold_index,
        confusion,
        model.feature_importance(),
        model.kind() == ModelKind::Logistic,
        train.scheme.low_mass_classes(&train_targets),
    ))
}

/// Outcome of one (vendor, task, model kind) unit across all folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum UnitOutcome {
    Completed {
        folds: Vec<FoldResult>,
        /// Per-class precision averaged over folds where it was defined.
        mean_precision: Vec<Option<f64>>,
        /// Folds with defined precision, per class.
        precision_coverage: Vec<usize>,
    },
    Failed {
        error: String,
    },
}

/// One evaluation unit of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitResult {
    pub vendor_id: String,
    pub category: String,
    pub task: PredictionTask,
    pub model_kind: ModelKind,
    pub outcome: UnitOutcome,
}

impl UnitResult {
    pub fn folds(&self) -> Option<&[FoldResult]> {
        match &self.outcome {
            UnitOutcome::Completed { folds, .. } => Some(folds),
            UnitOutcome::Failed { .. } => None,
        }
    }

    fn mean_precision(&self, class: usize) -> Option<f64> {
        match &self.outcome {
            UnitOutcome::Completed { mean_precision, .. } => mean_precision[class],
            UnitOutcome::Failed { .. } => None,
        }
    }
}

/// AVG/MAX/MIN of per-vendor mean precision within one category cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub model_kind: ModelKind,
    pub epa_type: ActivityType,
    pub q: usize,
    pub horizon_days: u32,
    pub category: String,
    pub class: usize,
    pub avg: Option<f64>,
    pub max: Option<f64>,
    pub min: Option<f64>,
    /// Vendors contributing at least one defined fold precision.
    pub vendors_covered: usize,
    pub vendors_total: usize,
}

/// Forest-vs-logistic paired comparison over (vendor, fold, class) cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    /// `None` pools every selected task.
    pub task: Option<PredictionTask>,
    pub n_pairs: usize,
    pub forest_mean: f64,
    pub logistic_mean: f64,
    pub ttest: TTestResult,
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub master_seed: u64,
    pub model_kinds: Vec<ModelKind>,
    pub tasks: Vec<PredictionTask>,
    pub categories: Vec<String>,
    pub units: Vec<UnitResult>,
    pub aggregates: Vec<AggregateCell>,
    pub significance: Vec<SignificanceResult>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn completed_units(&self, kind: ModelKind) -> usize {
        self.units
            .iter()
            .filter(|u| u.model_kind == kind && matches!(u.outcome, UnitOutcome::Completed { .. }))
            .count()
    }

    pub fn failed_units(&self) -> usize {
        self.units
            .iter()
            .filter(|u| matches!(u.outcome, UnitOutcome::Failed { .. }))
            .count()
    }

    pub fn units_for(&self, kind: ModelKind) -> impl Iterator<Item = &UnitResult> {
        self.units.iter().filter(move |u| u.model_kind == kind)
    }
}

/// Pre-computed features for every eligible prediction day of one panel.
fn feature_cache(panel: &VendorPanel) -> Result<BTreeMap<Date, FeatureVector>> {
    let mut cache = BTreeMap::new();
    let mut day = earliest_valid_t_p(panel);
    while day <= panel.end_date() {
        cache.insert(day, build_features(panel, day)?);
        day = crate::date::add_days(day, 1);
    }
    Ok(cache)
}

fn evaluate_unit(
    panel: &VendorPanel,
    cache: &BTreeMap<Date, FeatureVector>,
    task: &PredictionTask,
    kind: ModelKind,
    config: &ExperimentConfig,
) -> Result<Vec<FoldResult>> {
    let folds = make_folds(&panel.range())?;
    folds
        .iter()
        .map(|fold| {
            let model_config =
                config.fold_model_config(kind, panel.vendor_id(), task, fold.fold_index);
            evaluate_fold_with(panel, task, fold, &model_config, |t_p| {
                cache
                    .get(&t_p)
                    .cloned()
                    .ok_or_else(|| Error::Range(format!("{t_p} missing from feature cache")))
            })
        })
        .collect()
}

/// Runs the full grid over `panels`.
///
/// Per-unit failures are recorded in the report and do not stop the run; a
/// report with failures is valid and flagged through [`ExperimentReport::failed_units`].
pub fn run_experiment(
    panels: &[VendorPanel],
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    config.validate()?;
    if panels.is_empty() {
        return Err(Error::EmptyDataset("no panels supplied".into()));
    }

    let caches: Vec<BTreeMap<Date, FeatureVector>> = panels
        .par_iter()
        .map(feature_cache)
        .collect::<Result<_>>()?;

    let unit_specs: Vec<(usize, PredictionTask, ModelKind)> = panels
        .iter()
        .enumerate()
        .flat_map(|(i, _)| {
            config
                .tasks
                .iter()
                .flat_map(move |task| config.model_kinds.iter().map(move |&kind| (i, *task, kind)))
        })
        .collect();

    let units: Vec<UnitResult> = unit_specs
        .par_iter()
        .map(|&(i, task, kind)| {
            let panel = &panels[i];
            let outcome = match evaluate_unit(panel, &caches[i], &task, kind, config) {
                Ok(folds) => {
                    let classes = task.q;
                    let mut mean_precision = Vec::with_capacity(classes);
                    let mut precision_coverage = Vec::with_capacity(classes);
                    for class in 0..classes {
                        let defined: Vec<f64> =
                            folds.iter().filter_map(|f| f.precision[class]).collect();
                        precision_coverage.push(defined.len());
                        mean_precision.push(if defined.is_empty() {
                            None
                        } else {
                            Some(defined.iter().sum::<f64>() / defined.len() as f64)
                        });
                    }
                    UnitOutcome::Completed {
                        folds,
                        mean_precision,
                        precision_coverage,
                    }
                }
                Err(err) => UnitOutcome::Failed {
                    error: err.to_string(),
                },
            };
            UnitResult {
                vendor_id: panel.vendor_id().to_string(),
                category: panel.category().to_string(),
                task,
                model_kind: kind,
                outcome,
            }
        })
        .collect();

    let mut categories: Vec<String> = panels.iter().map(|p| p.category().to_string()).collect();
    categories.sort();
    categories.dedup();

    let aggregates = aggregate(&units, &categories, config);
    let significance = significance(&units, config);

    Ok(ExperimentReport {
        master_seed: config.master_seed,
        model_kinds: config.model_kinds.clone(),
        tasks: config.tasks.clone(),
        categories,
        units,
        aggregates,
        significance,
    })
}

fn aggregate(
    units: &[UnitResult],
    categories: &[String],
    config: &ExperimentConfig,
) -> Vec<AggregateCell> {
    let mut cells = Vec::new();
    let mut scopes: Vec<String> = vec![ALL_CATEGORIES.to_string()];
    scopes.extend(categories.iter().cloned());
    for &kind in &config.model_kinds {
        for task in &config.tasks {
            for category in &scopes {
                for class in 0..task.q {
                    let vendor_means: Vec<Option<f64>> = units
                        .iter()
                        .filter(|u| {
                            u.model_kind == kind
                                && u.task == *task
                                && (category == ALL_CATEGORIES || u.category == *category)
                        })
                        .map(|u| u.mean_precision(class))
                        .collect();
                    let defined: Vec<f64> = vendor_means.iter().flatten().copied().collect();
                    let (avg, max, min) = if defined.is_empty() {
                        (None, None, None)
                    } else {
                        (
                            Some(defined.iter().sum::<f64>() / defined.len() as f64),
                            Some(defined.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                            Some(defined.iter().copied().fold(f64::INFINITY, f64::min)),
                        )
                    };
                    cells.push(AggregateCell {
                        model_kind: kind,
                        epa_type: task.epa_type,
                        q: task.q,
                        horizon_days: task.horizon_days,
                        category: category.clone(),
                        class,
                        avg,
                        max,
                        min,
                        vendors_covered: defined.len(),
                        vendors_total: vendor_means.len(),
                    });
                }
            }
        }
    }
    cells
}

fn significance(units: &[UnitResult], config: &ExperimentConfig) -> Vec<SignificanceResult> {
    if !(config.model_kinds.contains(&ModelKind::Forest)
        && config.model_kinds.contains(&ModelKind::Logistic))
    {
        return Vec::new();
    }
    let mut results = Vec::new();
    let mut pooled: (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for task in &config.tasks {
        let mut forest_values = Vec::new();
        let mut logistic_values = Vec::new();
        let forest_units: Vec<&UnitResult> = units
            .iter()
            .filter(|u| u.model_kind == ModelKind::Forest && u.task == *task)
            .collect();
        for forest_unit in forest_units {
            let logistic_unit = units.iter().find(|u| {
                u.model_kind == ModelKind::Logistic
                    && u.task == *task
                    && u.vendor_id == forest_unit.vendor_id
            });
            let (Some(ff), Some(lf)) = (forest_unit.folds(), logistic_unit.and_then(|u| u.folds()))
            else {
                continue;
            };
            // Pair per (fold, class) where both sides are defined.
            for (f_fold, l_fold) in ff.iter().zip(lf) {
                for class in 0..task.q {
                    if let (Some(fp), Some(lp)) = (f_fold.precision[class], l_fold.precision[class])
                    {
                        forest_values.push(fp);
                        logistic_values.push(lp);
                    }
                }
            }
        }
        pooled.0.extend(&forest_values);
        pooled.1.extend(&logistic_values);
        if forest_values.len() >= 2 {
            if let Ok(ttest) = paired_t_test(&forest_values, &logistic_values) {
                results.push(SignificanceResult {
                    task: Some(*task),
                    n_pairs: forest_values.len(),
                    forest_mean: mean(&forest_values),
                    logistic_mean: mean(&logistic_values),
                    ttest,
                });
            }
        }
    }
    if pooled.0.len() >= 2 {
        if let Ok(ttest) = paired_t_test(&pooled.0, &pooled.1) {
            results.push(SignificanceResult {
                task: None,
                n_pairs: pooled.0.len(),
                forest_mean: mean(&pooled.0),
                logistic_mean: mean(&pooled.1),
                ttest,
            });
        }
    }
    results
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean feature rank across fold results, ascending (best first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRankImportance {
    /// `(feature name, mean rank)` sorted by mean rank.
    pub entries: Vec<(String, f64)>,
    /// True when every contributing fold ranked |standardized weights|
    /// instead of impurity decrease.
    pub from_weights: bool,
}

/// Averages per-fold importance ranks; accepts results pooled across folds
/// and vendors.
pub fn mean_rank_importance(fold_results: &[&FoldResult]) -> Result<MeanRankImportance> {
    let Some(first) = fold_results.first() else {
        return Err(Error::InsufficientData("no fold results to rank".into()));
    };
    let width = first.importance_ranks.len();
    let mut sums = vec![0.0; width];
    for result in fold_results {
        if result.importance_ranks.len() != width {
            return Err(Error::Dimension(
                "mixed feature widths in rank aggregation".into(),
            ));
        }
        for (s, r) in sums.iter_mut().zip(&result.importance_ranks) {
            *s += r;
        }
    }
    let names = crate::learn::names_for_width(width);
    let mut entries: Vec<(usize, String, f64)> = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| (i, name, sums[i] / fold_results.len() as f64))
        .collect();
    entries.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)));
    Ok(MeanRankImportance {
        entries: entries
            .into_iter()
            .map(|(_, name, rank)| (name, rank))
            .collect(),
        from_weights: fold_results.iter().all(|r| r.importance_from_weights),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_fleet, Coupling, FleetConfig};

    fn smoke_config() -> ExperimentConfig {
        ExperimentConfig {
            forest: ForestConfig {
                n_trees: 5,
                max_depth: 6,
                ..Default::default()
            },
            logistic: LogisticConfig {
                epochs: 25,
                ..Default::default()
            },
            master_seed: 7,
            ..Default::default()
        }
    }

    fn two_vendor_panels() -> Vec<crate::panel::VendorPanel> {
        generate_fleet(&FleetConfig {
            noise_scale: 0.2,
            coupling: vec![Coupling {
                source: ActivityType::Post,
                target: ActivityType::Search,
                beta: 1.0,
            }],
            lag_days: 1,
            ..FleetConfig::new(11, 2, 731)
        })
        .unwrap()
    }

    #[test]
    fn two_vendors_full_grid_is_54_units_per_kind() {
        let report = run_experiment(&two_vendor_panels(), &smoke_config()).unwrap();
        assert_eq!(report.completed_units(ModelKind::Forest), 54);
        assert_eq!(report.completed_units(ModelKind::Logistic), 54);
        assert_eq!(report.units.len(), 2 * 27 * 2);
        assert_eq!(report.failed_units(), 0);
        for unit in &report.units {
            let folds = unit.folds().unwrap();
            assert_eq!(folds.len(), 12);
            for fold in folds {
                assert_eq!(fold.confusion.total(), fold.n_test);
            }
        }
    }

    #[test]
    fn aggregate_avg_lies_within_min_max() {
        let report = run_experiment(&two_vendor_panels(), &smoke_config()).unwrap();
        for cell in &report.aggregates {
            if let (Some(avg), Some(max), Some(min)) = (cell.avg, cell.max, cell.min) {
                assert!(min <= avg + 1e-12 && avg <= max + 1e-12);
                assert!(cell.vendors_covered <= cell.vendors_total);
            }
        }
    }

    #[test]
    fn aggregates_are_recomputable_from_fold_results() {
        let report = run_experiment(&two_vendor_panels(), &smoke_config()).unwrap();
        for cell in &report.aggregates {
            // Per-vendor fold means, then aggregated across vendors.
            let per_vendor: Vec<f64> = report
                .units
                .iter()
                .filter(|u| {
                    u.model_kind == cell.model_kind
                        && u.task.epa_type == cell.epa_type
                        && u.task.q == cell.q
                        && u.task.horizon_days == cell.horizon_days
                        && (cell.category == ALL_CATEGORIES || u.category == cell.category)
                })
                .filter_map(|u| {
                    let folds = u.folds()?;
                    let defined: Vec<f64> = folds
                        .iter()
                        .filter_map(|f| f.precision[cell.class])
                        .collect();
                    (!defined.is_empty())
                        .then(|| defined.iter().sum::<f64>() / defined.len() as f64)
                })
                .collect();
            assert_eq!(cell.vendors_covered, per_vendor.len());
            match cell.avg {
                Some(avg) => {
                    let expected = per_vendor.iter().sum::<f64>() / per_vendor.len() as f64;
                    assert!((avg - expected).abs() < 1e-12);
                    let max = per_vendor.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let min = per_vendor.iter().copied().fold(f64::INFINITY, f64::min);
                    assert_eq!(cell.max, Some(max));
                    assert_eq!(cell.min, Some(min));
                }
                None => assert!(per_vendor.is_empty()),
            }
        }
    }

    #[test]
    fn degenerate_target_stream_completes_with_flags() {
        // An order stream that is almost surely zero every day collapses the
        // quantile thresholds; the unit must still complete, with the empty
        // classes flagged rather than crashing or fabricating precision.
        let mut synth = crate::synth::SynthConfig::new(13, 731);
        synth.base_rates.insert(ActivityType::Order, 1e-9);
        let panel = crate::synth::generate(&synth).unwrap();
        let config = ExperimentConfig {
            tasks: vec![PredictionTask::new(ActivityType::Order, 1, 3).unwrap()],
            model_kinds: vec![ModelKind::Forest],
            ..smoke_config()
        };
        let report = run_experiment(&[panel], &config).unwrap();
        assert_eq!(report.failed_units(), 0);
        let unit = &report.units[0];
        let UnitOutcome::Completed {
            folds,
            mean_precision,
            precision_coverage,
        } = &unit.outcome
        else {
            panic!("unit failed");
        };
        // Every target is zero: class 0 is always right, the rest never occur.
        assert_eq!(mean_precision[0], Some(1.0));
        assert_eq!(precision_coverage[1], 0);
        assert_eq!(precision_coverage[2], 0);
        for fold in folds {
            assert!(!fold.low_mass_classes.is_empty());
        }
    }

    #[test]
    fn short_panel_units_fail_without_stopping_the_run() {
        let mut panels = two_vendor_panels();
        let short = generate_fleet(&FleetConfig::new(5, 1, 200)).unwrap();
        panels.extend(short);
        let report = run_experiment(&panels, &smoke_config()).unwrap();
        assert_eq!(report.failed_units(), 27 * 2);
        assert_eq!(report.completed_units(ModelKind::Forest), 54);
    }

    #[test]
    fn rerun_is_byte_identical_across_thread_counts() {
        let panels = two_vendor_panels();
        let config = ExperimentConfig {
            tasks: vec![
                PredictionTask::new(ActivityType::Order, 1, 3).unwrap(),
                PredictionTask::new(ActivityType::Search, 7, 5).unwrap(),
            ],
            ..smoke_config()
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&panels, &config).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_experiment(&panels, &config).unwrap());
        assert_eq!(single.to_json().unwrap(), multi.to_json().unwrap());
    }

    #[test]
    fn mean_rank_symmetry_and_flags() {
        let mk = |ranks: Vec<f64>, from_weights: bool| FoldResult {
            fold_index: 1,
            n_test: 0,
            confusion: ConfusionMatrix {
                classes: 2,
                counts: vec![vec![0; 2]; 2],
            },
            precision: vec![None; 2],
            recall: vec![None; 2],
            f1: vec![None; 2],
            importance: vec![0.0; ranks.len()],
            importance_ranks: ranks,
            importance_from_weights: from_weights,
            low_mass_classes: vec![],
        };
        let a = mk(vec![1.0, 2.0], false);
        let b = mk(vec![2.0, 1.0], false);
        let ranked = mean_rank_importance(&[&a, &b]).unwrap();
        assert_eq!(ranked.entries[0].1, 1.5);
        assert_eq!(ranked.entries[1].1, 1.5);
        assert!(!ranked.from_weights);
        let w = mk(vec![1.0, 2.0], true);
        assert!(mean_rank_importance(&[&w]).unwrap().from_weights);
        assert!(mean_rank_importance(&[]).is_err());
    }

    #[test]
    fn baseline_is_one_over_q() {
        assert_eq!(random_baseline(2), 0.5);
        assert!((random_baseline(3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(random_baseline(5), 0.2);
    }
}
