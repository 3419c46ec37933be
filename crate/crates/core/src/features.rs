//! The 66-dimensional SMA feature grid.
//!
//! For each SMA stream in order (post, repost, comment) the vector holds the
//! previous-day volume followed by seven window statistics (sum, mean, max,
//! min, var, stdev, theil) over each trailing window of 3, 5 and 7 days:
//! `1 + 3*7 = 22` features per stream, 66 in total.
//!
//! Window convention: "K days before `t_p`" is the closed window
//! `[t_p - K + 1, t_p]`; the anchor day is complete at prediction time and
//! is included. The `prev` feature is the volume on `t_p` itself (the 1-day
//! window sum), controlled by [`PREV_OFFSET_DAYS`].

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::date::{sub_days, Date};
use crate::error::{Error, Result};
use crate::panel::{ActivityType, DailySeries, VendorPanel};

/// Trailing window lengths used by the grid.
pub const FEATURE_WINDOWS: [usize; 3] = [3, 5, 7];

/// Statistics computed per window, in canonical order.
pub const WINDOW_STATS: [&str; 7] = ["sum", "mean", "max", "min", "var", "stdev", "theil"];

/// Total features: 3 SMA streams x (1 prev + 3 windows x 7 stats).
pub const FEATURE_COUNT: usize = 66;

/// Days before `t_p` that the `prev` feature reads. Zero = the anchor day
/// itself; isolated here because either reading of "previous day" is
/// defensible.
pub const PREV_OFFSET_DAYS: u64 = 0;

/// Longest lookback any feature needs, in days before `t_p`.
pub const FEATURE_LOOKBACK_DAYS: u64 = 6;

static FEATURE_NAMES: LazyLock<Vec<String>> = LazyLock::new(|| {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    for sma in ActivityType::SMA {
        names.push(format!("{sma}_prev"));
        for k in FEATURE_WINDOWS {
            for stat in WINDOW_STATS {
                names.push(format!("{sma}_{k}d_{stat}"));
            }
        }
    }
    assert_eq!(names.len(), FEATURE_COUNT);
    names
});

/// The canonical 66 feature names, in vector order.
pub fn feature_names() -> &'static [String] {
    &FEATURE_NAMES
}

/// Median of all pairwise slopes `(v[j]-v[i])/(j-i)`; mean of the two middle
/// slopes for even counts.
pub fn theil_sen(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "theil-sen needs >= 2 values, got {}",
            values.len()
        )));
    }
    let mut slopes = Vec::with_capacity(values.len() * (values.len() - 1) / 2);
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            slopes.push((values[j] - values[i]) / (j - i) as f64);
        }
    }
    let m = slopes.len();
    Ok(if m % 2 == 1 {
        *slopes.select_nth_unstable_by(m / 2, f64::total_cmp).1
    } else {
        let upper = *slopes.select_nth_unstable_by(m / 2, f64::total_cmp).1;
        let lower = *slopes[..m / 2]
            .select_nth_unstable_by(m / 2 - 1, f64::total_cmp)
            .1;
        (lower + upper) / 2.0
    })
}

/// The seven per-window statistics in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub sum: f64,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    /// Population variance (divide by K).
    pub var: f64,
    pub stdev: f64,
    pub theil: f64,
}

impl WindowStats {
    pub fn as_array(&self) -> [f64; 7] {
        [
            self.sum, self.mean, self.max, self.min, self.var, self.stdev, self.theil,
        ]
    }
}

/// Statistics of the closed window `[t_p - K + 1, t_p]` of one stream.
pub fn window_stats(series: &DailySeries, t_p: Date, k: usize) -> Result<WindowStats> {
    if !FEATURE_WINDOWS.contains(&k) {
        return Err(Error::Config(format!(
            "window length must be one of {FEATURE_WINDOWS:?}, got {k}"
        )));
    }
    let end = series
        .index_of(t_p)
        .ok_or_else(|| Error::Range(format!("{t_p} outside series range {}", series.range())))?;
    if end + 1 < k {
        return Err(Error::Range(format!(
            "{k}-day window before {t_p} starts before the series"
        )));
    }
    let window: Vec<f64> = series.values()[end + 1 - k..=end]
        .iter()
        .map(|&v| v as f64)
        .collect();
    let sum: f64 = window.iter().sum();
    let mean = sum / k as f64;
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k as f64;
    Ok(WindowStats {
        sum,
        mean,
        max,
        min,
        var,
        stdev: var.sqrt(),
        theil: theil_sen(&window)?,
    })
}

/// The 66 SMA-derived statistics for one vendor at one prediction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    t_p: Date,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn t_p(&self) -> Date {
        self.t_p
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn names(&self) -> &'static [String] {
        feature_names()
    }

    /// Value by canonical name.
    pub fn get(&self, name: &str) -> Option<f64> {
        let idx = feature_names().iter().position(|n| n == name)?;
        Some(self.values[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        feature_names()
            .iter()
            .map(|n| n.as_str())
            .zip(self.values.iter().copied())
    }
}

/// Earliest `t_p` for which all feature windows fit inside the panel.
pub fn earliest_valid_t_p(panel: &VendorPanel) -> Date {
    crate::date::add_days(panel.start_date(), FEATURE_LOOKBACK_DAYS)
}

/// Builds the canonical 66-entry feature vector for `panel` at `t_p`.
///
/// Reads only SMA days `<= t_p`; EPA streams are never touched.
pub fn build_features(panel: &VendorPanel, t_p: Date) -> Result<FeatureVector> {
    let earliest = earliest_valid_t_p(panel);
    if t_p < earliest || t_p > panel.end_date() {
        return Err(Error::Range(format!(
            "t_p {t_p} outside feature-eligible range {earliest}..{}",
            panel.end_date()
        )));
    }
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    for sma in ActivityType::SMA {
        let series = panel.series(sma);
        let prev_day = sub_days(t_p, PREV_OFFSET_DAYS);
        values.push(series.value_on(prev_day).expect("prev day in range") as f64);
        for k in FEATURE_WINDOWS {
            values.extend(window_stats(series, t_p, k)?.as_array());
        }
    }
    debug_assert_eq!(values.len(), FEATURE_COUNT);
    Ok(FeatureVector { t_p, values })
}
