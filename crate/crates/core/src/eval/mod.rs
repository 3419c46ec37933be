//! Temporal cross-validation, multi-class metrics, grid experiments, and
//! forest-vs-logistic significance testing.

mod experiment;
mod folds;
mod metrics;
mod report;
mod ttest;

pub use experiment::{
    evaluate_fold, mean_rank_importance, random_baseline, run_experiment, AggregateCell,
    ExperimentConfig, ExperimentReport, MeanRankImportance, SignificanceResult, UnitOutcome,
    UnitResult, ALL_CATEGORIES,
};
pub use folds::{make_folds, FoldSpec, FOLD_COUNT, TRAIN_MONTHS};
pub use metrics::{ranks_descending, ConfusionMatrix, FoldResult};
pub use report::{
    precision_3q_horizons_csv, precision_5q_nextday_csv, summary_text, top_features_csv,
};
pub use ttest::{
    paired_t_test, regularized_incomplete_beta, student_t_cdf, two_sided_p, TTestResult,
};
