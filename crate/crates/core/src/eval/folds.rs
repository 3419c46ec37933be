//! Sliding temporal cross-validation folds.
//!
//! Twelve folds, each training on 12 consecutive calendar months and testing
//! on the following month, advanced by one calendar month per fold. A range
//! spanning exactly 2016-2017 yields fold 1 = train 2016, test Jan 2017 and
//! fold 12 = train Dec 2016..Nov 2017, test Dec 2017.

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::date::{add_days, add_months, month_start, Date, DateRange};
use crate::error::{Error, Result};

/// Number of folds produced by [`make_folds`].
pub const FOLD_COUNT: usize = 12;

/// Training window length in calendar months.
pub const TRAIN_MONTHS: u32 = 12;

/// One train/test split on calendar-month boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    /// 1-based fold number.
    pub fold_index: usize,
    pub train: DateRange,
    pub test: DateRange,
}

impl FoldSpec {
    /// Train must end the day before test begins.
    pub fn is_contiguous(&self) -> bool {
        add_days(self.train.end, 1) == self.test.start
    }
}

/// First day of the first whole calendar month inside `range`.
fn first_full_month(range: &DateRange) -> Date {
    if range.start.day() == 1 {
        range.start
    } else {
        add_months(month_start(range.start), 1)
    }
}

/// Builds the 12 sliding folds over `panel_range`.
///
/// The range must contain at least 24 whole calendar months starting from
/// its first full month; month boundaries are taken from the calendar, not
/// from fixed 30-day blocks.
pub fn make_folds(panel_range: &DateRange) -> Result<Vec<FoldSpec>> {
    let base = first_full_month(panel_range);
    let months_needed = TRAIN_MONTHS + FOLD_COUNT as u32; // 24
    let last_needed_day = add_months(base, months_needed)
        .pred_opt()
        .expect("valid predecessor");
    if last_needed_day > panel_range.end {
        let available = {
            let mut m = 0;
            while add_months(base, m + 1) <= add_days(panel_range.end, 1) {
                m += 1;
            }
            m
        };
        return Err(Error::Range(format!(
            "temporal cross-validation needs {months_needed} whole calendar months from {base}, \
             found {available} in {panel_range}"
        )));
    }

    let folds = (1..=FOLD_COUNT)
        .map(|fold_index| {
            let shift = (fold_index - 1) as u32;
            let train_start = add_months(base, shift);
            let test_start = add_months(base, shift + TRAIN_MONTHS);
            let test_end = add_months(base, shift + TRAIN_MONTHS + 1)
                .pred_opt()
                .unwrap();
            let spec = FoldSpec {
                fold_index,
                train: DateRange {
                    start: train_start,
                    end: test_start.pred_opt().unwrap(),
                },
                test: DateRange {
                    start: test_start,
                    end: test_end,
                },
            };
            debug_assert!(spec.is_contiguous());
            spec
        })
        .collect();
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Date {
        s.parse().unwrap()
    }

    fn two_years() -> DateRange {
        DateRange::new(d("2016-01-01"), d("2017-12-31")).unwrap()
    }

    #[test]
    fn fold_one_matches_calendar_anchors() {
        let folds = make_folds(&two_years()).unwrap();
        assert_eq!(folds.len(), 12);
        assert_eq!(
            folds[0].train,
            DateRange::new(d("2016-01-01"), d("2016-12-31")).unwrap()
        );
        assert_eq!(
            folds[0].test,
            DateRange::new(d("2017-01-01"), d("2017-01-31")).unwrap()
        );
    }

    #[test]
    fn fold_twelve_is_shifted_eleven_months() {
        let folds = make_folds(&two_years()).unwrap();
        assert_eq!(
            folds[11].train,
            DateRange::new(d("2016-12-01"), d("2017-11-30")).unwrap()
        );
        assert_eq!(
            folds[11].test,
            DateRange::new(d("2017-12-01"), d("2017-12-31")).unwrap()
        );
    }

    #[test]
    fn every_fold_is_contiguous_and_leak_free() {
        let folds = make_folds(&two_years()).unwrap();
        for (i, fold) in folds.iter().enumerate() {
            assert_eq!(fold.fold_index, i + 1);
            assert!(fold.is_contiguous());
            assert!(fold.train.end < fold.test.start);
            assert_eq!(fold.train.start.day(), 1);
            assert_eq!(fold.test.start.day(), 1);
        }
        for pair in folds.windows(2) {
            assert_eq!(pair[1].train.start, add_months(pair[0].train.start, 1));
        }
    }

    #[test]
    fn twenty_three_months_is_a_range_error() {
        let short = DateRange::new(d("2016-01-01"), d("2017-11-30")).unwrap();
        assert!(matches!(make_folds(&short), Err(Error::Range(_))));
    }

    #[test]
    fn mid_month_start_snaps_to_next_full_month() {
        let range = DateRange::new(d("2015-12-15"), d("2017-12-31")).unwrap();
        let folds = make_folds(&range).unwrap();
        assert_eq!(folds[0].train.start, d("2016-01-01"));
    }
}
