//! Plot-ready renderings of an [`ExperimentReport`](super::ExperimentReport).
//!
//! Three CSV table shapes mirror the standard presentation of this pipeline:
//! per-class AVG/MAX/MIN precision by category for next-day 5-quantile runs,
//! per-horizon average precision by category for 3-quantile runs, and the
//! top-10 mean-rank features per EPA type. All cells are fixed to three
//! decimals; undefined cells stay empty.

use std::fmt::Write as _;

use crate::error::Result;
use crate::labeling::PredictionTask;
use crate::learn::ModelKind;
use crate::panel::ActivityType;

use super::experiment::{mean_rank_importance, AggregateCell, ExperimentReport, ALL_CATEGORIES};

fn fmt_cell(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.3}")).unwrap_or_default()
}

fn cell<'a>(
    report: &'a ExperimentReport,
    kind: ModelKind,
    epa: ActivityType,
    q: usize,
    horizon: u32,
    category: &str,
    class: usize,
) -> Option<&'a AggregateCell> {
    report.aggregates.iter().find(|c| {
        c.model_kind == kind
            && c.epa_type == epa
            && c.q == q
            && c.horizon_days == horizon
            && c.category == category
            && c.class == class
    })
}

/// Next-day 5-quantile forest precision: AVG/MAX/MIN per class, one row per
/// (EPA type, category).
pub fn precision_5q_nextday_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("epa_type,category");
    for class in 0..5 {
        write!(out, ",c{class}_avg,c{class}_max,c{class}_min").unwrap();
    }
    out.push('\n');
    for &epa in &ActivityType::EPA {
        for category in &report.categories {
            write!(out, "{epa},{category}").unwrap();
            for class in 0..5 {
                let found = cell(report, ModelKind::Forest, epa, 5, 1, category, class);
                let (avg, max, min) = found
                    .map(|c| (c.avg, c.max, c.min))
                    .unwrap_or((None, None, None));
                write!(
                    out,
                    ",{},{},{}",
                    fmt_cell(avg),
                    fmt_cell(max),
                    fmt_cell(min)
                )
                .unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// 3-quantile forest average precision per class and horizon (1/3/7 days),
/// one row per (EPA type, category) plus an all-vendor AVG row.
pub fn precision_3q_horizons_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("epa_type,category");
    for class in 0..3 {
        for h in crate::labeling::HORIZONS {
            write!(out, ",c{class}_{h}d_avg").unwrap();
        }
    }
    out.push('\n');
    for &epa in &ActivityType::EPA {
        let mut scopes: Vec<&str> = report.categories.iter().map(String::as_str).collect();
        scopes.push(ALL_CATEGORIES);
        for category in scopes {
            write!(out, "{epa},{category}").unwrap();
            for class in 0..3 {
                for h in crate::labeling::HORIZONS {
                    let avg = cell(report, ModelKind::Forest, epa, 3, h, category, class)
                        .and_then(|c| c.avg);
                    write!(out, ",{}", fmt_cell(avg)).unwrap();
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Top-10 features per EPA type by mean rank across all vendors and folds of
/// the 3-quantile next-day forest units.
pub fn top_features_csv(report: &ExperimentReport) -> Result<String> {
    let mut columns: Vec<(ActivityType, Vec<String>)> = Vec::new();
    for &epa in &ActivityType::EPA {
        let task = PredictionTask::new(epa, 1, 3)?;
        let fold_results: Vec<_> = report
            .units_for(ModelKind::Forest)
            .filter(|u| u.task == task)
            .filter_map(|u| u.folds())
            .flatten()
            .collect();
        let names = if fold_results.is_empty() {
            Vec::new()
        } else {
            mean_rank_importance(&fold_results)?
                .entries
                .into_iter()
                .take(10)
                .map(|(name, _)| name)
                .collect()
        };
        columns.push((epa, names));
    }
    let mut out = String::from("rank");
    for (epa, _) in &columns {
        write!(out, ",{epa}").unwrap();
    }
    out.push('\n');
    for rank in 0..10 {
        write!(out, "{}", rank + 1).unwrap();
        for (_, names) in &columns {
            write!(
                out,
                ",{}",
                names.get(rank).map(String::as_str).unwrap_or("")
            )
            .unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Human-readable per-category summary printed by the CLI after a run.
pub fn summary_text(report: &ExperimentReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "units: {} completed forest, {} completed logistic, {} failed",
        report.completed_units(ModelKind::Forest),
        report.completed_units(ModelKind::Logistic),
        report.failed_units()
    )
    .unwrap();
    let mut qs: Vec<usize> = report.tasks.iter().map(|t| t.q).collect();
    qs.sort_unstable();
    qs.dedup();
    for q in qs {
        writeln!(
            out,
            "random baseline for {q}-q: {:.3}",
            super::random_baseline(q)
        )
        .unwrap();
    }
    for &kind in &report.model_kinds {
        for cell in report
            .aggregates
            .iter()
            .filter(|c| c.model_kind == kind && c.category == ALL_CATEGORIES && c.horizon_days == 1)
        {
            if let Some(avg) = cell.avg {
                writeln!(
                    out,
                    "{kind} {} {}q class {}: avg precision {avg:.3} over {}/{} vendors",
                    cell.epa_type, cell.q, cell.class, cell.vendors_covered, cell.vendors_total
                )
                .unwrap();
            }
        }
    }
    for sig in &report.significance {
        let scope = sig
            .task
            .map(|t| t.label())
            .unwrap_or_else(|| "all tasks".to_string());
        writeln!(
            out,
            "forest vs logistic ({scope}): mean {:.3} vs {:.3}, t={:.3}, p={:.4}{}",
            sig.forest_mean,
            sig.logistic_mean,
            sig.ttest.t,
            sig.ttest.p,
            if sig.ttest.degenerate_variance {
                " (degenerate variance)"
            } else {
                ""
            }
        )
        .unwrap();
    }
    out
}
