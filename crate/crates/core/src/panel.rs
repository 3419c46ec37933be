//! Domain types: activity streams and aligned vendor panels.
//!
//! A vendor panel holds six contiguous daily count series over a shared date
//! range: three social-media activity (SMA) streams the vendor generates or
//! receives on the social platform, and three e-commerce platform activity
//! (EPA) streams its customers generate on the commerce platform. All types
//! are immutable after construction and safe to share across threads.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::date::{add_days, sub_days, Date, DateRange};
use crate::error::{Error, Result};

/// The six daily activity streams tracked per vendor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityType {
    Post,
    Repost,
    Comment,
    Search,
    Clickthrough,
    Order,
}

impl ActivityType {
    /// All six types in canonical order.
    pub const ALL: [ActivityType; 6] = [
        ActivityType::Post,
        ActivityType::Repost,
        ActivityType::Comment,
        ActivityType::Search,
        ActivityType::Clickthrough,
        ActivityType::Order,
    ];

    /// The social-media side of the panel.
    pub const SMA: [ActivityType; 3] = [
        ActivityType::Post,
        ActivityType::Repost,
        ActivityType::Comment,
    ];

    /// The e-commerce side of the panel.
    pub const EPA: [ActivityType; 3] = [
        ActivityType::Search,
        ActivityType::Clickthrough,
        ActivityType::Order,
    ];

    pub fn is_sma(self) -> bool {
        matches!(
            self,
            ActivityType::Post | ActivityType::Repost | ActivityType::Comment
        )
    }

    pub fn is_epa(self) -> bool {
        !self.is_sma()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityType::Post => "post",
            ActivityType::Repost => "repost",
            ActivityType::Comment => "comment",
            ActivityType::Search => "search",
            ActivityType::Clickthrough => "clickthrough",
            ActivityType::Order => "order",
        }
    }

    /// Stable small index used for seeding per-stream generators.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|t| *t == self).unwrap()
    }
}

impl FromStr for ActivityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "post" => Ok(ActivityType::Post),
            "repost" => Ok(ActivityType::Repost),
            "comment" => Ok(ActivityType::Comment),
            "search" => Ok(ActivityType::Search),
            "clickthrough" => Ok(ActivityType::Clickthrough),
            "order" => Ok(ActivityType::Order),
            other => Err(Error::Schema(format!("unknown activity type {other:?}"))),
        }
    }
}

impl std::fmt::Display for ActivityType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Contiguous, date-indexed sequence of non-negative daily counts.
///
/// Day `i` corresponds to `start_date + i`; there are no gaps or duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailySeries {
    start_date: Date,
    values: Vec<u64>,
}

impl DailySeries {
    pub fn new(start_date: Date, values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData(
                "daily series must be non-empty".into(),
            ));
        }
        Ok(Self { start_date, values })
    }

    pub fn start_date(&self) -> Date {
        self.start_date
    }

    pub fn end_date(&self) -> Date {
        add_days(self.start_date, self.values.len() as u64 - 1)
    }

    pub fn range(&self) -> DateRange {
        DateRange {
            start: self.start_date,
            end: self.end_date(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Values as `f64`, the form every statistic consumes.
    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }

    /// Index of `date` within the series, if covered.
    pub fn index_of(&self, date: Date) -> Option<usize> {
        if date < self.start_date || date > self.end_date() {
            return None;
        }
        Some((date - self.start_date).num_days() as usize)
    }

    pub fn date_at(&self, index: usize) -> Date {
        debug_assert!(index < self.values.len());
        add_days(self.start_date, index as u64)
    }

    pub fn value_on(&self, date: Date) -> Option<u64> {
        self.index_of(date).map(|i| self.values[i])
    }

    /// Sub-series covering exactly `range`.
    pub fn slice(&self, range: &DateRange) -> Result<DailySeries> {
        let (start, end) = match (self.index_of(range.start), self.index_of(range.end)) {
            (Some(s), Some(e)) => (s, e),
            _ => {
                return Err(Error::Range(format!(
                    "requested {range} outside series range {}",
                    self.range()
                )))
            }
        };
        Ok(DailySeries {
            start_date: range.start,
            values: self.values[start..=end].to_vec(),
        })
    }

    /// Re-frames the series onto `range`, zero-filling days it does not cover.
    fn extend_to(&self, range: &DateRange) -> DailySeries {
        let mut values = vec![0u64; range.len_days() as usize];
        for (i, v) in self.values.iter().enumerate() {
            let date = add_days(self.start_date, i as u64);
            if range.contains(date) {
                values[(date - range.start).num_days() as usize] = *v;
            }
        }
        DailySeries {
            start_date: range.start,
            values,
        }
    }
}

/// How to reconcile series with differing date ranges during alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    /// Absent days (and absent streams) become zero counts.
    #[default]
    ZeroFill,
    /// Any range mismatch or absent stream is an error.
    Strict,
}

/// Six aligned daily series for one vendor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VendorPanel {
    vendor_id: String,
    category: String,
    streams: BTreeMap<ActivityType, DailySeries>,
}

/// Category label used when none is supplied.
pub const UNCATEGORIZED: &str = "uncategorized";

impl VendorPanel {
    /// Builds a panel from pre-aligned series. All six types must be present
    /// with identical ranges.
    pub fn new(
        vendor_id: impl Into<String>,
        category: impl Into<String>,
        streams: BTreeMap<ActivityType, DailySeries>,
    ) -> Result<Self> {
        let missing: Vec<ActivityType> = ActivityType::ALL
            .iter()
            .copied()
            .filter(|t| !streams.contains_key(t))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Alignment(missing));
        }
        let reference = streams[&ActivityType::Post].range();
        let mismatched: Vec<ActivityType> = streams
            .iter()
            .filter(|(_, s)| s.range() != reference)
            .map(|(t, _)| *t)
            .collect();
        if !mismatched.is_empty() {
            return Err(Error::Alignment(mismatched));
        }
        Ok(Self {
            vendor_id: vendor_id.into(),
            category: category.into(),
            streams,
        })
    }

    /// Aligns per-type series onto a shared date range.
    ///
    /// Under `ZeroFill` the panel covers the union of all supplied ranges and
    /// absent days or whole absent streams become zeros. Under `Strict` every
    /// type must be present with an identical range; offending types are
    /// reported otherwise.
    pub fn align(
        vendor_id: impl Into<String>,
        category: impl Into<String>,
        series_by_type: BTreeMap<ActivityType, DailySeries>,
        policy: FillPolicy,
    ) -> Result<Self> {
        if series_by_type.is_empty() {
            return Err(Error::MissingActivityType);
        }
        let mut union = series_by_type.values().next().unwrap().range();
        for s in series_by_type.values() {
            union.start = union.start.min(s.start_date());
            union.end = union.end.max(s.end_date());
        }

        if policy == FillPolicy::Strict {
            let offending: Vec<ActivityType> = ActivityType::ALL
                .iter()
                .copied()
                .filter(|t| series_by_type.get(t).map(|s| s.range()) != Some(union))
                .collect();
            if !offending.is_empty() {
                return Err(Error::Alignment(offending));
            }
        }

        let zero = DailySeries {
            start_date: union.start,
            values: vec![0; union.len_days() as usize],
        };
        let streams = ActivityType::ALL
            .iter()
            .map(|&t| {
                let series = series_by_type
                    .get(&t)
                    .map(|s| s.extend_to(&union))
                    .unwrap_or_else(|| zero.clone());
                (t, series)
            })
            .collect();
        Self::new(vendor_id, category, streams)
    }

    pub fn vendor_id(&self) -> &str {
        &self.vendor_id
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    pub fn series(&self, activity_type: ActivityType) -> &DailySeries {
        &self.streams[&activity_type]
    }

    pub fn streams(&self) -> &BTreeMap<ActivityType, DailySeries> {
        &self.streams
    }

    pub fn start_date(&self) -> Date {
        self.streams[&ActivityType::Post].start_date()
    }

    pub fn end_date(&self) -> Date {
        self.streams[&ActivityType::Post].end_date()
    }

    pub fn range(&self) -> DateRange {
        DateRange {
            start: self.start_date(),
            end: self.end_date(),
        }
    }

    pub fn len_days(&self) -> usize {
        self.streams[&ActivityType::Post].len()
    }

    /// Panel restricted to exactly `range`.
    pub fn slice(&self, range: &DateRange) -> Result<VendorPanel> {
        if !self.range().contains_range(range) {
            return Err(Error::Range(format!(
                "requested {range} outside panel range {}",
                self.range()
            )));
        }
        let streams = self
            .streams
            .iter()
            .map(|(&t, s)| Ok((t, s.slice(range)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::new(self.vendor_id.clone(), self.category.clone(), streams)
    }

    /// Clone with one day of one stream replaced. Test instrumentation for
    /// leakage probes; panels are otherwise immutable.
    pub fn with_value(
        &self,
        activity_type: ActivityType,
        date: Date,
        value: u64,
    ) -> Result<VendorPanel> {
        let mut clone = self.clone();
        let series = clone.streams.get_mut(&activity_type).unwrap();
        let idx = series
            .index_of(date)
            .ok_or_else(|| Error::Range(format!("{date} outside panel range {}", self.range())))?;
        series.values[idx] = value;
        Ok(clone)
    }
}

/// Convenience for building the largest window end: the last date whose
/// `h`-day lookahead still fits in `range`.
pub fn last_anchor_with_lookahead(range: &DateRange, horizon: u64) -> Option<Date> {
    if range.len_days() <= horizon {
        return None;
    }
    Some(sub_days(range.end, horizon))
}
