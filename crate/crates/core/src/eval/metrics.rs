//! Confusion matrices and per-class precision/recall/F1.
//!
//! A class that was never predicted has undefined precision; it stays `None`
//! rather than being counted as zero, and aggregation layers track coverage
//! separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row = true class, column = predicted class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: usize,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn from_pairs(truths: &[usize], predictions: &[usize], classes: usize) -> Result<Self> {
        if truths.len() != predictions.len() {
            return Err(Error::Dimension(format!(
                "{} truths vs {} predictions",
                truths.len(),
                predictions.len()
            )));
        }
        let mut counts = vec![vec![0usize; classes]; classes];
        for (&t, &p) in truths.iter().zip(predictions) {
            if t >= classes || p >= classes {
                return Err(Error::Dimension(format!(
                    "label ({t}, {p}) outside 0..{classes}"
                )));
            }
            counts[t][p] += 1;
        }
        Ok(Self { classes, counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    fn column_sum(&self, class: usize) -> usize {
        self.counts.iter().map(|row| row[class]).sum()
    }

    fn row_sum(&self, class: usize) -> usize {
        self.counts[class].iter().sum()
    }

    /// `TP / column sum`; `None` when the class was never predicted.
    pub fn precision(&self, class: usize) -> Option<f64> {
        let predicted = self.column_sum(class);
        (predicted > 0).then(|| self.counts[class][class] as f64 / predicted as f64)
    }

    /// `TP / row sum`; `None` when the class never occurred.
    pub fn recall(&self, class: usize) -> Option<f64> {
        let actual = self.row_sum(class);
        (actual > 0).then(|| self.counts[class][class] as f64 / actual as f64)
    }

    /// Harmonic mean of precision and recall; `None` when either is
    /// undefined, 0 when both are 0.
    pub fn f1(&self, class: usize) -> Option<f64> {
        let p = self.precision(class)?;
        let r = self.recall(class)?;
        Some(if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        })
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        (0..self.classes).map(|c| self.counts[c][c]).sum::<usize>() as f64 / total as f64
    }
}

/// Per-feature descending-importance ranks, 1-based; tied values share the
/// mean of their positions.
pub fn ranks_descending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share mean rank of (i+1)..=(j+1).
        let mean_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

/// Evaluation of one model on one fold's test month.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold_index: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub precision: Vec<Option<f64>>,
    pub recall: Vec<Option<f64>>,
    pub f1: Vec<Option<f64>>,
    /// Normalized feature importance from the trained model.
    pub importance: Vec<f64>,
    /// 1..n ranks of `importance`, ties averaged.
    pub importance_ranks: Vec<f64>,
    /// True when importance came from logistic weights rather than forest
    /// impurity decrease.
    pub importance_from_weights: bool,
    /// Training classes that received under 5% of the quantile mass.
    pub low_mass_classes: Vec<usize>,
}

impl FoldResult {
    pub fn from_confusion(
        fold_index: usize,
        confusion: ConfusionMatrix,
        importance: Vec<f64>,
        importance_from_weights: bool,
        low_mass_classes: Vec<usize>,
    ) -> Self {
        let classes = confusion.classes;
        let precision = (0..classes).map(|c| confusion.precision(c)).collect();
        let recall = (0..classes).map(|c| confusion.recall(c)).collect();
        let f1 = (0..classes).map(|c| confusion.f1(c)).collect();
        let importance_ranks = ranks_descending(&importance);
        Self {
            fold_index,
            n_test: confusion.total(),
            confusion,
            precision,
            recall,
            f1,
            importance,
            importance_ranks,
            importance_from_weights,
            low_mass_classes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn perfect_predictor_has_diagonal_confusion() {
        let y = vec![0, 1, 2, 1, 0, 2, 2];
        let cm = ConfusionMatrix::from_pairs(&y, &y, 3).unwrap();
        for c in 0..3 {
            assert_eq!(cm.precision(c), Some(1.0));
            assert_eq!(cm.recall(c), Some(1.0));
            assert_eq!(cm.f1(c), Some(1.0));
        }
        assert_eq!(cm.accuracy(), 1.0);
        assert_eq!(cm.total(), 7);
    }

    #[test]
    fn constant_predictor_precision_is_prevalence() {
        let truths = vec![0, 0, 1, 2, 0, 1];
        let predictions = vec![0; 6];
        let cm = ConfusionMatrix::from_pairs(&truths, &predictions, 3).unwrap();
        assert_eq!(cm.precision(0), Some(0.5));
        assert_eq!(cm.precision(1), None);
        assert_eq!(cm.precision(2), None);
        assert_eq!(cm.recall(0), Some(1.0));
        assert_eq!(cm.recall(1), Some(0.0));
    }

    #[test]
    fn metrics_match_naive_recount() {
        let mut rng = SplitMix64::new(33);
        for _ in 0..50 {
            let classes = 2 + rng.next_below(4);
            let n = 5 + rng.next_below(200);
            let truths: Vec<usize> = (0..n).map(|_| rng.next_below(classes)).collect();
            let predictions: Vec<usize> = (0..n).map(|_| rng.next_below(classes)).collect();
            let cm = ConfusionMatrix::from_pairs(&truths, &predictions, classes).unwrap();
            for c in 0..classes {
                // Direct recount straight from the definition.
                let tp = truths
                    .iter()
                    .zip(&predictions)
                    .filter(|(&t, &p)| t == c && p == c)
                    .count();
                let predicted = predictions.iter().filter(|&&p| p == c).count();
                let actual = truths.iter().filter(|&&t| t == c).count();
                let expected_p = (predicted > 0).then(|| tp as f64 / predicted as f64);
                let expected_r = (actual > 0).then(|| tp as f64 / actual as f64);
                assert_eq!(cm.precision(c), expected_p);
                assert_eq!(cm.recall(c), expected_r);
            }
            // Micro-averaged recall equals accuracy.
            let micro: f64 = (0..classes).map(|c| cm.counts[c][c] as f64).sum::<f64>() / n as f64;
            assert!((micro - cm.accuracy()).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_values_stay_in_unit_interval() {
        let mut rng = SplitMix64::new(34);
        let truths: Vec<usize> = (0..300).map(|_| rng.next_below(5)).collect();
        let predictions: Vec<usize> = (0..300).map(|_| rng.next_below(5)).collect();
        let cm = ConfusionMatrix::from_pairs(&truths, &predictions, 5).unwrap();
        for c in 0..5 {
            for value in [cm.precision(c), cm.recall(c), cm.f1(c)]
                .into_iter()
                .flatten()
            {
                assert!((0.0..=1.0).contains(&value));
            }
        }
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(ranks_descending(&[0.5, 0.3, 0.2]), vec![1.0, 2.0, 3.0]);
        assert_eq!(ranks_descending(&[0.4, 0.4, 0.2]), vec![1.5, 1.5, 3.0]);
        let all_zero = ranks_descending(&[0.0; 66]);
        assert!(all_zero.iter().all(|&r| r == 33.5));
    }
}
