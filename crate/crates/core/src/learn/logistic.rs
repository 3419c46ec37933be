//! Multinomial logistic regression trained by full-batch gradient descent.
//!
//! Loss is L2-regularized mean cross-entropy (intercepts unpenalized),
//! minimized from zero initial weights. After each proposed step the loss is
//! re-evaluated; if it rose by more than 1e-9 the learning rate is halved
//! and the step retried, so the recorded loss sequence is non-increasing up
//! to that slack. At the learning-rate floor training stops early.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{
    class_counts, names_for_width, validate_training_inputs, LogisticConfig, ModelConfig,
    ModelMetadata, ModelParams, TrainedModel,
};

const LR_FLOOR: f64 = 1e-12;

/// Softmax weights plus the standardization fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    /// `classes x features` weight matrix (on standardized inputs).
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub means: Vec<f64>,
    /// Population standard deviation per feature; 0 marks a constant column.
    pub stds: Vec<f64>,
    pub standardize: bool,
}

impl Logistic {
    fn standardized(&self, row: &[f64]) -> Vec<f64> {
        if !self.standardize {
            return row.to_vec();
        }
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&v, (&m, &s))| if s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn probabilities(&self, row: &[f64]) -> Vec<f64> {
        let z = self.standardized(row);
        let logits: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, &b)| b + w.iter().zip(&z).map(|(wi, zi)| wi * zi).sum::<f64>())
            .collect();
        softmax(&logits)
    }

    /// |weight| summed over classes per feature (inputs are standardized, so
    /// magnitudes are comparable), normalized to sum to 1 when non-zero.
    pub fn weight_importance(&self) -> Vec<f64> {
        let n_features = self.means.len();
        let mut importance = vec![0.0; n_features];
        for class_weights in &self.weights {
            for (total, w) in importance.iter_mut().zip(class_weights) {
                *total += w.abs();
            }
        }
        let total: f64 = importance.iter().sum();
        if total > 0.0 {
            for v in &mut importance {
                *v /= total;
            }
        }
        importance
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean cross-entropy with L2 penalty, plus its analytic gradient.
///
/// `x` must already be in the space the weights act on. Exposed so tests can
/// check the gradient against central finite differences.
pub fn softmax_loss_and_grad(
    x: &[Vec<f64>],
    y: &[usize],
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let n = x.len() as f64;
    let classes = weights.len();
    let n_features = weights[0].len();
    let mut loss = 0.0;
    let mut grad_w = vec![vec![0.0; n_features]; classes];
    let mut grad_b = vec![0.0; classes];

    for (row, &label) in x.iter().zip(y) {
        let logits: Vec<f64> = weights
            .iter()
            .zip(bias)
            .map(|(w, &b)| b + w.iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>())
            .collect();
        let probs = softmax(&logits);
        loss -= probs[label].max(f64::MIN_POSITIVE).ln();
        for c in 0..classes {
            let residual = probs[c] - f64::from(c == label);
            grad_b[c] += residual;
            for (g, xi) in grad_w[c].iter_mut().zip(row) {
                *g += residual * xi;
            }
        }
    }

    loss /= n;
    for c in 0..classes {
        grad_b[c] /= n;
        for (g, w) in grad_w[c].iter_mut().zip(&weights[c]) {
            *g = *g / n + l2 * w;
        }
    }
    let penalty: f64 = weights
        .iter()
        .flat_map(|row| row.iter().map(|w| w * w))
        .sum::<f64>()
        * 0.5
        * l2;
    (loss + penalty, grad_w, grad_b)
}

/// Trains a softmax classifier on rows `x` with labels `y` in `0..classes`.
pub fn train_logistic(
    x: &[Vec<f64>],
    y: &[usize],
    classes: usize,
    config: &LogisticConfig,
) -> Result<TrainedModel> {
    let n_features = validate_training_inputs(x, y, classes)?;
    config.validate()?;

    let n = x.len() as f64;
    let mut means = vec![0.0; n_features];
    let mut stds = vec![0.0; n_features];
    if config.standardize {
        for row in x {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        for row in x {
            for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
        }
    }
    let transformed: Vec<Vec<f64>> = if config.standardize {
        x.iter()
            .map(|row| {
                row.iter()
                    .zip(means.iter().zip(&stds))
                    .map(|(&v, (&m, &s))| if s > 0.0 { (v - m) / s } else { 0.0 })
                    .collect()
            })
            .collect()
    } else {
        x.to_vec()
    };

    let mut weights = vec![vec![0.0; n_features]; classes];
    let mut bias = vec![0.0; classes];
    let mut lr = config.learning_rate;
    let (mut loss, mut grad_w, mut grad_b) =
        softmax_loss_and_grad(&transformed, y, &weights, &bias, config.l2);
    if !loss.is_finite() {
        return Err(Error::TrainingDiverged { epoch: 0 });
    }

    'epochs: for epoch in 0..config.epochs {
        loop {
            let candidate_w: Vec<Vec<f64>> = weights
                .iter()
                .zip(&grad_w)
                .map(|(wr, gr)| wr.iter().zip(gr).map(|(w, g)| w - lr * g).collect())
                .collect();
            let candidate_b: Vec<f64> = bias.iter().zip(&grad_b).map(|(b, g)| b - lr * g).collect();
            let (new_loss, new_gw, new_gb) =
                softmax_loss_and_grad(&transformed, y, &candidate_w, &candidate_b, config.l2);
            if new_loss.is_finite() && new_loss <= loss + 1e-9 {
                weights = candidate_w;
                bias = candidate_b;
                loss = new_loss;
                grad_w = new_gw;
                grad_b = new_gb;
                break;
            }
            if lr <= LR_FLOOR {
                if !new_loss.is_finite() {
                    return Err(Error::TrainingDiverged { epoch });
                }
                break 'epochs; // no admissible step remains
            }
            lr /= 2.0;
        }
    }

    let counts = class_counts(y, classes);
    let absent = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0)
        .map(|(k, _)| k)
        .collect();
    Ok(TrainedModel {
        classes,
        feature_names: names_for_width(n_features),
        params: ModelParams::Logistic(Logistic {
            weights,
            bias,
            means,
            stds,
            standardize: config.standardize,
        }),
        metadata: ModelMetadata {
            config: ModelConfig::Logistic(*config),
            n_train: x.len(),
            class_counts: counts,
            absent_classes: absent,
            data_range: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn zero_weights_give_uniform_probabilities() {
        let model = Logistic {
            weights: vec![vec![0.0; 4]; 5],
            bias: vec![0.0; 5],
            means: vec![0.0; 4],
            stds: vec![1.0; 4],
            standardize: true,
        };
        let probs = model.probabilities(&[1.0, -2.0, 0.5, 3.0]);
        for p in probs {
            assert!((p - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn linearly_separable_data_is_learned() {
        let mut rng = SplitMix64::new(2);
        let x: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.next_f64() * 8.0 - 4.0, rng.next_f64() * 8.0 - 4.0])
            .collect();
        let y: Vec<usize> = x
            .iter()
            .map(|r| usize::from(r[0] + 0.5 * r[1] >= 0.8))
            .collect();
        let model = train_logistic(&x, &y, 2, &LogisticConfig::default()).unwrap();
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(row, &label)| model.predict_row(row).unwrap().0 == label)
            .count();
        assert!(
            correct as f64 / x.len() as f64 >= 0.99,
            "accuracy {correct}/200"
        );
    }

    #[test]
    fn constant_features_converge_to_class_priors() {
        let x: Vec<Vec<f64>> = (0..100).map(|_| vec![5.0, -1.0]).collect();
        let mut y = vec![0usize; 70];
        y.extend(vec![1usize; 30]);
        let config = LogisticConfig {
            learning_rate: 1.0,
            epochs: 5_000,
            l2: 0.0,
            ..Default::default()
        };
        let model = train_logistic(&x, &y, 2, &config).unwrap();
        let (_, probs) = model.predict_row(&[5.0, -1.0]).unwrap();
        assert!((probs[0] - 0.7).abs() < 1e-6, "p0 = {}", probs[0]);
        assert!((probs[1] - 0.3).abs() < 1e-6, "p1 = {}", probs[1]);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = SplitMix64::new(4);
        let x: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..6).map(|_| rng.next_f64()).collect())
            .collect();
        let y: Vec<usize> = (0..50).map(|_| rng.next_below(3)).collect();
        let model = train_logistic(&x, &y, 3, &LogisticConfig::default()).unwrap();
        for _ in 0..200 {
            let probe: Vec<f64> = (0..6).map(|_| rng.next_f64() * 10.0).collect();
            let (_, probs) = model.predict_row(&probe).unwrap();
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let mut rng = SplitMix64::new(5);
        for trial in 0..20 {
            let classes = 2 + rng.next_below(3);
            let n_features = 1 + rng.next_below(5);
            let n = 10 + rng.next_below(30);
            let x: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..n_features)
                        .map(|_| rng.next_f64() * 4.0 - 2.0)
                        .collect()
                })
                .collect();
            let y: Vec<usize> = (0..n).map(|_| rng.next_below(classes)).collect();
            let l2 = if trial % 2 == 0 { 0.01 } else { 0.0 };
            let mut weights: Vec<Vec<f64>> = (0..classes)
                .map(|_| (0..n_features).map(|_| rng.next_f64() - 0.5).collect())
                .collect();
            let bias: Vec<f64> = (0..classes).map(|_| rng.next_f64() - 0.5).collect();
            let (_, grad_w, _) = softmax_loss_and_grad(&x, &y, &weights, &bias, l2);

            for _ in 0..5 {
                let c = rng.next_below(classes);
                let f = rng.next_below(n_features);
                let eps = 1e-6 * (1.0 + weights[c][f].abs());
                let original = weights[c][f];
                weights[c][f] = original + eps;
                let (plus, _, _) = softmax_loss_and_grad(&x, &y, &weights, &bias, l2);
                weights[c][f] = original - eps;
                let (minus, _, _) = softmax_loss_and_grad(&x, &y, &weights, &bias, l2);
                weights[c][f] = original;
                let numeric = (plus - minus) / (2.0 * eps);
                assert!(
                    (numeric - grad_w[c][f]).abs() <= 1e-5,
                    "grad mismatch: analytic {} vs numeric {numeric}",
                    grad_w[c][f]
                );
            }
        }
    }

    #[test]
    fn pathological_inputs_report_divergence() {
        let x: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![if i < 5 { 1e308 } else { -1e308 }])
            .collect();
        let y: Vec<usize> = (0..10).map(|i| usize::from(i < 5)).collect();
        let config = LogisticConfig {
            standardize: false,
            ..Default::default()
        };
        match train_logistic(&x, &y, 2, &config) {
            Err(Error::TrainingDiverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn training_is_deterministic() {
        let mut rng = SplitMix64::new(6);
        let x: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..5).map(|_| rng.next_f64()).collect())
            .collect();
        let y: Vec<usize> = (0..40).map(|_| rng.next_below(3)).collect();
        let a = train_logistic(&x, &y, 3, &LogisticConfig::default()).unwrap();
        let b = train_logistic(&x, &y, 3, &LogisticConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
