//! Cumulative EPA targets and their quantile class labels.
//!
//! The target at prediction time `t_p` is the sum of one EPA stream over the
//! strictly-future days `t_p+1 ..= t_p+h`. Class labels come from empirical
//! quantile thresholds fitted on training targets; test values outside the
//! training range clamp to the extreme classes.

use serde::{Deserialize, Serialize};

use crate::date::{add_days, Date, DateRange};
use crate::error::{Error, Result};
use crate::features::{build_features, earliest_valid_t_p, FeatureVector};
use crate::panel::{ActivityType, DailySeries, VendorPanel};

/// Supported prediction horizons, in days.
pub const HORIZONS: [u32; 3] = [1, 3, 7];

/// Supported quantile counts.
pub const QUANTILES: [usize; 3] = [2, 3, 5];

/// First future day offset included in the target window. The cumulative
/// window is `t_p + TARGET_START_OFFSET ..= t_p + h`; 1 keeps targets
/// strictly future of the feature anchor. Isolated because the alternative
/// reading (include `t_p` itself) is plausible.
pub const TARGET_START_OFFSET: u64 = 1;

/// One cell of the prediction grid: which stream, how far ahead, how many
/// classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredictionTask {
    pub epa_type: ActivityType,
    pub horizon_days: u32,
    pub q: usize,
}

impl PredictionTask {
    pub fn new(epa_type: ActivityType, horizon_days: u32, q: usize) -> Result<Self> {
        if !epa_type.is_epa() {
            return Err(Error::Config(format!("{epa_type} is not an EPA type")));
        }
        if !HORIZONS.contains(&horizon_days) {
            return Err(Error::Config(format!(
                "horizon must be one of {HORIZONS:?}, got {horizon_days}"
            )));
        }
        if !QUANTILES.contains(&q) {
            return Err(Error::Config(format!(
                "q must be one of {QUANTILES:?}, got {q}"
            )));
        }
        Ok(Self {
            epa_type,
            horizon_days,
            q,
        })
    }

    /// The full 3 x 3 x 3 = 27-task grid, in canonical order.
    pub fn full_grid() -> Vec<PredictionTask> {
        let mut grid = Vec::with_capacity(27);
        for epa in ActivityType::EPA {
            for q in QUANTILES {
                for h in HORIZONS {
                    grid.push(PredictionTask {
                        epa_type: epa,
                        horizon_days: h,
                        q,
                    });
                }
            }
        }
        grid
    }

    /// Short stable label, e.g. `order_3q_1d`.
    pub fn label(&self) -> String {
        format!("{}_{}q_{}d", self.epa_type, self.q, self.horizon_days)
    }
}

/// Sum of `series` over `t_p+1 ..= t_p+h`.
pub fn cumulative_target(series: &DailySeries, t_p: Date, horizon_days: u32) -> Result<f64> {
    let first = add_days(t_p, TARGET_START_OFFSET);
    let last = add_days(t_p, horizon_days as u64);
    match (series.index_of(first), series.index_of(last)) {
        (Some(a), Some(b)) => Ok(series.values()[a..=b].iter().map(|&v| v as f64).sum()),
        _ => Err(Error::Range(format!(
            "target window {first}..{last} outside series range {}",
            series.range()
        ))),
    }
}

/// Fitted quantile thresholds mapping a target value to a class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileScheme {
    pub q: usize,
    /// `q - 1` non-decreasing thresholds.
    pub thresholds: Vec<f64>,
    pub fitted_on: DateRange,
    pub n_train: usize,
}

impl QuantileScheme {
    /// Fits thresholds as interpolated order statistics at positions
    /// `k(n-1)/q` of the sorted training targets.
    pub fn fit(training_targets: &[f64], q: usize, fitted_on: DateRange) -> Result<Self> {
        if training_targets.is_empty() {
            return Err(Error::InsufficientData(
                "no training targets to fit quantiles".into(),
            ));
        }
        if !QUANTILES.contains(&q) {
            return Err(Error::Config(format!(
                "q must be one of {QUANTILES:?}, got {q}"
            )));
        }
        let mut sorted = training_targets.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let thresholds = (1..q)
            .map(|k| {
                let pos = k as f64 * (n - 1) as f64 / q as f64;
                let lo = pos.floor() as usize;
                let hi = pos.ceil() as usize;
                let frac = pos - lo as f64;
                sorted[lo] * (1.0 - frac) + sorted[hi] * frac
            })
            .collect();
        Ok(Self {
            q,
            thresholds,
            fitted_on,
            n_train: n,
        })
    }

    /// Class of `value`: the smallest `k` with `value <= thresholds[k]`,
    /// else `q - 1`. Exact threshold hits go to the lower class; values
    /// outside the training range clamp to the extreme classes.
    pub fn assign_label(&self, value: f64) -> usize {
        for (k, f) in self.thresholds.iter().enumerate() {
            if value <= *f {
                return k;
            }
        }
        self.q - 1
    }

    /// Classes that received under 5% of the training mass; non-empty for
    /// heavily degenerate target distributions (e.g. mostly-zero Order
    /// streams).
    pub fn low_mass_classes(&self, training_targets: &[f64]) -> Vec<usize> {
        let mut counts = vec![0usize; self.q];
        for &t in training_targets {
            counts[self.assign_label(t)] += 1;
        }
        let floor = 0.05 * training_targets.len() as f64;
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| (c as f64) < floor)
            .map(|(k, _)| k)
            .collect()
    }
}

/// One supervised example: features at `t_p`, cumulative target, class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub t_p: Date,
    pub features: FeatureVector,
    pub target_value: f64,
    pub label: usize,
}

/// Whether to fit thresholds on this dataset (training) or reuse a fitted
/// scheme (test).
#[derive(Debug, Clone)]
pub enum SchemeMode {
    Fit,
    Use(QuantileScheme),
}

/// A labeled dataset plus the scheme that labeled it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    pub scheme: QuantileScheme,
}

/// Builds one example per eligible `t_p` in `range`.
///
/// Eligibility: the 7-day feature lookback must fit in the panel (it may
/// reach before `range.start`), and the `h`-day target window must stay
/// inside both the panel and `range` (targets never read past the range).
pub fn build_dataset(
    panel: &VendorPanel,
    task: &PredictionTask,
    range: &DateRange,
    mode: SchemeMode,
) -> Result<Dataset> {
    build_dataset_with(panel, task, range, mode, |t_p| build_features(panel, t_p))
}

/// [`build_dataset`] with an injected feature source, letting callers reuse
/// vectors cached across overlapping folds and tasks.
pub fn build_dataset_with(
    panel: &VendorPanel,
    task: &PredictionTask,
    range: &DateRange,
    mode: SchemeMode,
    features_at: impl Fn(Date) -> Result<FeatureVector>,
) -> Result<Dataset> {
    if !panel.range().contains_range(range) {
        return Err(Error::Range(format!(
            "dataset range {range} outside panel range {}",
            panel.range()
        )));
    }
    let series = panel.series(task.epa_type);
    let first = earliest_valid_t_p(panel).max(range.start);
    let horizon = task.horizon_days as u64;

    let mut anchors = Vec::new();
    let mut t_p = first;
    while add_days(t_p, horizon) <= range.end {
        anchors.push(t_p);
        t_p = add_days(t_p, 1);
    }
    if anchors.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "no eligible prediction days in {range} for task {}",
            task.label()
        )));
    }

    let targets: Vec<f64> = anchors
        .iter()
        .map(|&t| cumulative_target(series, t, task.horizon_days))
        .collect::<Result<_>>()?;
    let scheme = match mode {
        SchemeMode::Fit => QuantileScheme::fit(&targets, task.q, *range)?,
        SchemeMode::Use(scheme) => {
            if scheme.q != task.q {
                return Err(Error::Config(format!(
                    "scheme has q={}, task needs q={}",
                    scheme.q, task.q
                )));
            }
            scheme
        }
    };

    let examples = anchors
        .into_iter()
        .zip(targets)
        .map(|(t_p, target_value)| {
            Ok(LabeledExample {
                t_p,
                features: features_at(t_p)?,
                label: scheme.assign_label(target_value),
                target_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { examples, scheme })
}
