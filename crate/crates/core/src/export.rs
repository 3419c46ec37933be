//! Plot-ready CSV renderings of correlation scans, feature matrices, and
//! labeled datasets.
//!
//! Correlation outputs use one long format shared by matrices and rolling
//! series: `vendor_id,sma_type,epa_type,lag,end_date,r`. Undefined
//! coefficients leave the `r` field empty; full-series matrix rows leave
//! `end_date` empty.

use std::fmt::Write as _;

use crate::correlation::{CorrelationMatrix, LagScan, RollingSeries};
use crate::date::Date;
use crate::error::Result;
use crate::features::{build_features, earliest_valid_t_p, feature_names};
use crate::labeling::Dataset;
use crate::panel::{ActivityType, VendorPanel};

pub const CORRELATION_HEADER: &str = "vendor_id,sma_type,epa_type,lag,end_date,r";
pub const LAG_SUMMARY_HEADER: &str =
    "vendor_id,sma_type,epa_type,lag,mean_r,min_r,max_r,defined_points,is_best";

fn fmt_r(r: Option<f64>) -> String {
    r.map(|v| v.to_string()).unwrap_or_default()
}

/// Appends the nine next-day matrix cells for one vendor.
pub fn push_matrix_rows(out: &mut String, vendor_id: &str, matrix: &CorrelationMatrix) {
    for (r, &sma) in matrix.rows.iter().enumerate() {
        for (c, &epa) in matrix.cols.iter().enumerate() {
            writeln!(
                out,
                "{vendor_id},{sma},{epa},1,,{}",
                fmt_r(matrix.cells[r][c])
            )
            .unwrap();
        }
    }
}

/// Appends one rolling series for one vendor/pair.
pub fn push_rolling_rows(
    out: &mut String,
    vendor_id: &str,
    sma: ActivityType,
    epa: ActivityType,
    series: &RollingSeries,
) {
    for (date, r) in &series.points {
        writeln!(
            out,
            "{vendor_id},{sma},{epa},{},{date},{}",
            series.lag_days,
            fmt_r(*r)
        )
        .unwrap();
    }
}

/// Appends per-lag summary rows for one vendor/pair.
pub fn push_lag_summary_rows(
    out: &mut String,
    vendor_id: &str,
    sma: ActivityType,
    epa: ActivityType,
    scan: &LagScan,
) {
    for entry in &scan.entries {
        writeln!(
            out,
            "{vendor_id},{sma},{epa},{},{},{},{},{},{}",
            entry.lag,
            fmt_r(entry.mean),
            fmt_r(entry.min),
            fmt_r(entry.max),
            entry.defined_points,
            u8::from(scan.best_lag == Some(entry.lag)),
        )
        .unwrap();
    }
}

/// Feature-matrix CSV: `vendor_id,t_p` plus the canonical 66 columns.
///
/// Emits one row per eligible day, or a single row when `at` is given.
pub fn features_csv(panel: &VendorPanel, at: Option<Date>) -> Result<String> {
    let mut out = String::from("vendor_id,t_p");
    for name in feature_names() {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    let days: Vec<Date> = match at {
        Some(day) => vec![day],
        None => {
            let mut days = Vec::new();
            let mut day = earliest_valid_t_p(panel);
            while day <= panel.end_date() {
                days.push(day);
                day = crate::date::add_days(day, 1);
            }
            days
        }
    };
    for day in days {
        let fv = build_features(panel, day)?;
        write!(out, "{},{day}", panel.vendor_id()).unwrap();
        for v in fv.values() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Labeled-dataset CSV: `vendor_id,t_p`, the 66 feature columns,
/// `target_value,label`.
pub fn dataset_csv(vendor_id: &str, dataset: &Dataset) -> String {
    let mut out = String::from("vendor_id,t_p");
    for name in feature_names() {
        write!(out, ",{name}").unwrap();
    }
    out.push_str(",target_value,label\n");
    for example in &dataset.examples {
        write!(out, "{vendor_id},{}", example.t_p).unwrap();
        for v in example.features.values() {
            write!(out, ",{v}").unwrap();
        }
        writeln!(out, ",{},{}", example.target_value, example.label).unwrap();
    }
    out
}
