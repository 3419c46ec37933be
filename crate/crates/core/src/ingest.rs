//! CSV ingestion: load, validate, and assemble vendor panels.
//!
//! One canonical schema: header `date,vendor_id,activity_type,count`, UTF-8,
//! comma-delimited, `\n` or `\r\n` line endings. Dates are ISO-8601
//! (YYYY-MM-DD) and activity types are case-insensitive. The vendor column
//! optionally carries a category prefix separated by `:` (e.g. `Food:v07`),
//! which round-trips panel categories through the fixed four-column schema.
//!
//! Malformed rows are rejected with line-level diagnostics and the load
//! continues; `strict` promotes any rejection to a fatal error. Duplicate
//! `(date, vendor, type)` keys are an error unless `aggregate_duplicates`
//! sums them.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::date::Date;
use crate::error::{Error, Result};
use crate::panel::{ActivityType, DailySeries, FillPolicy, VendorPanel, UNCATEGORIZED};

/// Required header, in order.
pub const CSV_HEADER: [&str; 4] = ["date", "vendor_id", "activity_type", "count"];

/// One validated input row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub date: Date,
    pub vendor_id: String,
    pub category: String,
    pub activity_type: ActivityType,
    pub count: u64,
}

/// Load/assembly statistics with line-level diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub panels_built: usize,
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub rows_rejected: usize,
    /// `(line number, message)`; line 0 marks file- or vendor-level notes.
    pub warnings: Vec<(u64, String)>,
}

impl IngestReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Knobs for [`load_csv`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Any rejected row aborts the load.
    pub strict: bool,
    /// Sum duplicate `(date, vendor, type)` rows instead of failing.
    pub aggregate_duplicates: bool,
}

/// Splits the vendor column into `(category, vendor_id)`.
fn split_vendor(field: &str) -> Option<(String, String)> {
    match field.split_once(':') {
        Some((category, vendor)) => {
            if category.is_empty() || vendor.is_empty() {
                None
            } else {
                Some((category.to_string(), vendor.to_string()))
            }
        }
        None => {
            if field.is_empty() {
                None
            } else {
                Some((UNCATEGORIZED.to_string(), field.to_string()))
            }
        }
    }
}

fn parse_row(fields: &csv::StringRecord) -> std::result::Result<RawRecord, String> {
    if fields.len() != 4 {
        return Err(format!("expected 4 fields, got {}", fields.len()));
    }
    let date: Date = fields[0]
        .trim()
        .parse()
        .map_err(|_| format!("unparsable date {:?}", &fields[0]))?;
    let (category, vendor_id) =
        split_vendor(fields[1].trim()).ok_or_else(|| format!("invalid vendor {:?}", &fields[1]))?;
    let activity_type: ActivityType = fields[2]
        .trim()
        .parse()
        .map_err(|_| format!("unknown activity type {:?}", &fields[2]))?;
    let count_text = fields[3].trim();
    let count = match count_text.parse::<i64>() {
        Ok(v) if v < 0 => return Err("negative count".to_string()),
        Ok(v) => v as u64,
        Err(_) => count_text
            .parse::<u64>()
            .map_err(|_| format!("invalid count {count_text:?}"))?,
    };
    Ok(RawRecord {
        date,
        vendor_id,
        category,
        activity_type,
        count,
    })
}

/// Loads and validates one CSV file.
pub fn load_csv(
    path: impl AsRef<Path>,
    options: &LoadOptions,
) -> Result<(Vec<RawRecord>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path.as_ref())
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(std::io::Error::other(e.to_string())),
            _ => Error::Schema(e.to_string()),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?;
    let normalized: Vec<String> = headers
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    if normalized != CSV_HEADER {
        return Err(Error::Schema(format!(
            "header must be {:?}, got {normalized:?}",
            CSV_HEADER.join(",")
        )));
    }

    let mut report = IngestReport::default();
    let mut records: Vec<RawRecord> = Vec::new();
    let mut seen: HashMap<(Date, String, ActivityType), usize> = HashMap::new();

    for row in reader.records() {
        let row = row.map_err(|e| Error::Schema(format!("unreadable row: {e}")))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        report.rows_read += 1;
        match parse_row(&row) {
            Ok(record) => {
                let key = (record.date, record.vendor_id.clone(), record.activity_type);
                if let Some(&existing) = seen.get(&key) {
                    if options.aggregate_duplicates {
                        records[existing].count += record.count;
                        report.rows_accepted += 1;
                        report.warnings.push((
                            line,
                            format!(
                                "duplicate row aggregated into ({}, {}, {})",
                                key.0, key.1, key.2
                            ),
                        ));
                    } else {
                        return Err(Error::DuplicateRow {
                            date: record.date,
                            vendor_id: record.vendor_id,
                            activity_type: record.activity_type,
                        });
                    }
                } else {
                    seen.insert(key, records.len());
                    records.push(record);
                    report.rows_accepted += 1;
                }
            }
            Err(message) => {
                if options.strict {
                    return Err(Error::Schema(format!("line {line}: {message}")));
                }
                report.rows_rejected += 1;
                report.warnings.push((line, message));
            }
        }
    }
    Ok((records, report))
}

/// Groups records into one panel per vendor.
///
/// Each panel spans the vendor's min..max observed date; unobserved
/// `(date, type)` cells are filled per `policy` via panel alignment. Vendors
/// with zero rows across every SMA type are skipped with a warning.
pub fn build_panels(
    records: &[RawRecord],
    policy: FillPolicy,
) -> Result<(BTreeMap<String, VendorPanel>, Vec<String>)> {
    let mut seen: HashMap<(Date, &str, ActivityType), ()> = HashMap::new();
    for r in records {
        if seen
            .insert((r.date, r.vendor_id.as_str(), r.activity_type), ())
            .is_some()
        {
            return Err(Error::DuplicateRow {
                date: r.date,
                vendor_id: r.vendor_id.clone(),
                activity_type: r.activity_type,
            });
        }
    }

    let mut by_vendor: BTreeMap<String, Vec<&RawRecord>> = BTreeMap::new();
    for r in records {
        by_vendor.entry(r.vendor_id.clone()).or_default().push(r);
    }

    let mut panels = BTreeMap::new();
    let mut warnings = Vec::new();
    for (vendor_id, rows) in by_vendor {
        let category = rows[0].category.clone();
        if rows.iter().any(|r| r.category != category) {
            return Err(Error::Schema(format!(
                "vendor {vendor_id} appears under conflicting categories"
            )));
        }
        if !rows.iter().any(|r| r.activity_type.is_sma() && r.count > 0) {
            warnings.push(format!(
                "vendor {vendor_id} skipped: no social-media activity to analyze"
            ));
            continue;
        }

        let mut cells: BTreeMap<ActivityType, BTreeMap<Date, u64>> = BTreeMap::new();
        for r in &rows {
            cells
                .entry(r.activity_type)
                .or_default()
                .insert(r.date, r.count);
        }
        let series_by_type: BTreeMap<ActivityType, DailySeries> = cells
            .into_iter()
            .map(|(activity_type, days)| {
                let start = *days.keys().next().unwrap();
                let end = *days.keys().next_back().unwrap();
                let len = (end - start).num_days() as usize + 1;
                let mut values = vec![0u64; len];
                for (date, count) in days {
                    values[(date - start).num_days() as usize] = count;
                }
                Ok((activity_type, DailySeries::new(start, values)?))
            })
            .collect::<Result<_>>()?;
        let panel = VendorPanel::align(vendor_id.clone(), category, series_by_type, policy)?;
        panels.insert(vendor_id, panel);
    }
    Ok((panels, warnings))
}

/// [`load_csv`] followed by [`build_panels`], with a merged report.
pub fn ingest_csv(
    path: impl AsRef<Path>,
    options: &LoadOptions,
    policy: FillPolicy,
) -> Result<(BTreeMap<String, VendorPanel>, IngestReport)> {
    let (records, mut report) = load_csv(path, options)?;
    let (panels, warnings) = build_panels(&records, policy)?;
    report.panels_built = panels.len();
    report.warnings.extend(warnings.into_iter().map(|w| (0, w)));
    Ok((panels, report))
}

/// Serializes a panel back to rows: every non-zero cell plus zero-count
/// anchor rows pinning the panel's start and end dates.
pub fn panel_to_records(panel: &VendorPanel) -> Vec<RawRecord> {
    let mut records = Vec::new();
    for (&activity_type, series) in panel.streams() {
        for (i, &count) in series.values().iter().enumerate() {
            let date = series.date_at(i);
            let is_anchor = activity_type == ActivityType::Post
                && (date == panel.start_date() || date == panel.end_date());
            if count > 0 || is_anchor {
                records.push(RawRecord {
                    date,
                    vendor_id: panel.vendor_id().to_string(),
                    category: panel.category().to_string(),
                    activity_type,
                    count,
                });
            }
        }
    }
    records
}

/// Renders records in the canonical CSV schema.
pub fn records_to_csv(records: &[RawRecord]) -> String {
    let mut out = String::from("date,vendor_id,activity_type,count\n");
    for r in records {
        // Vendors with the default category are written bare, unless the id
        // itself contains ':' and would mis-split on re-ingest.
        let vendor = if r.category == UNCATEGORIZED && !r.vendor_id.contains(':') {
            r.vendor_id.clone()
        } else {
            format!("{}:{}", r.category, r.vendor_id)
        };
        let vendor = if vendor.contains(',') || vendor.contains('"') || vendor.contains('\n') {
            format!("\"{}\"", vendor.replace('"', "\"\""))
        } else {
            vendor
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.date, vendor, r.activity_type, r.count
        ));
    }
    out
}
