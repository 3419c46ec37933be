//! Calendar arithmetic shared across the pipeline.
//!
//! All dates are proleptic Gregorian calendar days with no time-zone
//! component; a "day" is the finest granularity anywhere in the crate.

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar date used throughout the crate.
pub type Date = NaiveDate;

/// Inclusive range of calendar days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DateRange {
    pub start: Date,
    pub end: Date,
}

impl DateRange {
    pub fn new(start: Date, end: Date) -> Result<Self> {
        if start > end {
            return Err(Error::Range(format!("start {start} after end {end}")));
        }
        Ok(Self { start, end })
    }

    /// Number of days in the range (inclusive of both endpoints).
    pub fn len_days(&self) -> u64 {
        (self.end - self.start).num_days() as u64 + 1
    }

    pub fn contains(&self, date: Date) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn contains_range(&self, other: &DateRange) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersect(&self, other: &DateRange) -> Option<DateRange> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start <= end).then_some(DateRange { start, end })
    }

    pub fn iter_days(&self) -> impl Iterator<Item = Date> + '_ {
        self.start.iter_days().take(self.len_days() as usize)
    }
}

impl std::fmt::Display for DateRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// First day of the month containing `date`.
pub fn month_start(date: Date) -> Date {
    Date::from_ymd_opt(date.year(), date.month(), 1).expect("valid first of month")
}

/// Last day of the month containing `date`.
pub fn month_end(date: Date) -> Date {
    let next = add_months(month_start(date), 1);
    next.pred_opt().expect("valid predecessor")
}

/// First day of the month `months` after the month containing `date`.
/// `date` must itself be a first-of-month.
pub fn add_months(date: Date, months: u32) -> Date {
    debug_assert_eq!(date.day(), 1);
    let total = date.year() * 12 + date.month0() as i32 + months as i32;
    let (year, month0) = (total.div_euclid(12), total.rem_euclid(12) as u32);
    Date::from_ymd_opt(year, month0 + 1, 1).expect("valid month arithmetic")
}

/// Adds `days` to `date`.
pub fn add_days(date: Date, days: u64) -> Date {
    date.checked_add_days(Days::new(days))
        .expect("date overflow")
}

/// Subtracts `days` from `date`.
pub fn sub_days(date: Date, days: u64) -> Date {
    date.checked_sub_days(Days::new(days))
        .expect("date underflow")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Date {
        s.parse().unwrap()
    }

    #[test]
    fn range_rejects_reversed_endpoints() {
        assert!(DateRange::new(d("2016-02-01"), d("2016-01-31")).is_err());
    }

    #[test]
    fn range_len_counts_both_endpoints() {
        let r = DateRange::new(d("2016-01-01"), d("2016-01-31")).unwrap();
        assert_eq!(r.len_days(), 31);
        let one = DateRange::new(d("2016-01-01"), d("2016-01-01")).unwrap();
        assert_eq!(one.len_days(), 1);
    }

    #[test]
    fn month_arithmetic_handles_year_wrap_and_leap() {
        assert_eq!(add_months(d("2016-12-01"), 1), d("2017-01-01"));
        assert_eq!(add_months(d("2016-01-01"), 23), d("2017-12-01"));
        assert_eq!(month_end(d("2016-02-10")), d("2016-02-29"));
        assert_eq!(month_end(d("2017-02-10")), d("2017-02-28"));
    }

    #[test]
    fn intersect_is_empty_when_disjoint() {
        let a = DateRange::new(d("2016-01-01"), d("2016-01-10")).unwrap();
        let b = DateRange::new(d("2016-01-11"), d("2016-01-20")).unwrap();
        assert!(a.intersect(&b).is_none());
        let c = DateRange::new(d("2016-01-05"), d("2016-01-15")).unwrap();
        assert_eq!(
            a.intersect(&c),
            Some(DateRange::new(d("2016-01-05"), d("2016-01-10")).unwrap())
        );
    }
}
