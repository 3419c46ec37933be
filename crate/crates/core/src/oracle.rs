//! Brute-force reference implementations.
//!
//! Every function here is a direct-from-definition computation kept
//! deliberately naive and free of any code shared with the production paths
//! it checks. Test suites compare optimized implementations against these.

use crate::error::{Error, Result};

/// Textbook two-pass Pearson correlation:
/// `r = sum((x-mx)(y-my)) / sqrt(sum((x-mx)^2) * sum((y-my)^2))`.
pub fn oracle_pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Dimension(format!(
            "pearson needs two equal-length sequences of >= 2 values, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..x.len() {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(cov / (vx * vy).sqrt())
}

/// Median of all `C(n,2)` pairwise slopes `(v[j]-v[i])/(j-i)`, `i < j`.
/// For an even slope count the median is the mean of the two middle values.
pub fn oracle_theil_sen(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "theil-sen needs >= 2 values, got {}",
            values.len()
        )));
    }
    let mut slopes = Vec::new();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            slopes.push((values[j] - values[i]) / (j - i) as f64);
        }
    }
    slopes.sort_by(f64::total_cmp);
    let m = slopes.len();
    Ok(if m % 2 == 1 {
        slopes[m / 2]
    } else {
        (slopes[m / 2 - 1] + slopes[m / 2]) / 2.0
    })
}

/// Quantile thresholds by linear interpolation between order statistics at
/// positions `k(n-1)/q` (0-indexed), re-derived naively.
pub fn oracle_quantile_thresholds(training: &[f64], q: usize) -> Result<Vec<f64>> {
    if training.is_empty() {
        return Err(Error::InsufficientData("empty training targets".into()));
    }
    let mut sorted = training.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut thresholds = Vec::with_capacity(q - 1);
    for k in 1..q {
        let pos = k as f64 * (n - 1) as f64 / q as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        thresholds.push(sorted[lo] * (1.0 - frac) + sorted[hi] * frac);
    }
    Ok(thresholds)
}

/// Class of `value` under left-open/right-closed threshold intervals with
/// out-of-range clamping: class `k` is the smallest `k` with
/// `value <= f_{k+1}`, else `q-1`.
pub fn oracle_quantile_label(training: &[f64], q: usize, value: f64) -> Result<usize> {
    let thresholds = oracle_quantile_thresholds(training, q)?;
    for (k, f) in thresholds.iter().enumerate() {
        if value <= *f {
            return Ok(k);
        }
    }
    Ok(q - 1)
}
