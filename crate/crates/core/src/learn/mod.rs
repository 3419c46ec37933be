//! From-scratch multi-class classifiers: a Gini-split random forest and a
//! multinomial (softmax) logistic regression, with per-feature importance.
//!
//! Both trainers are fully deterministic given `(data, config.seed)`;
//! retraining is bit-stable regardless of thread count.

mod forest;
mod logistic;

pub use forest::{train_forest, Forest, TreeNode};
pub use logistic::{softmax_loss_and_grad, train_logistic, Logistic};

use serde::{Deserialize, Serialize};

use crate::date::DateRange;
use crate::error::{Error, Result};
use crate::features::{feature_names, FeatureVector, FEATURE_COUNT};

/// Random-forest hyperparameters.
///
/// Defaults are this crate's choices, recorded in model metadata; every value
/// is overridable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features sampled per split; default `ceil(sqrt(66)) = 9`.
    pub features_per_split: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 12,
            min_samples_leaf: 2,
            features_per_split: 9,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_samples_leaf == 0 {
            return Err(Error::Config("forest counts must be >= 1".into()));
        }
        if self.features_per_split == 0 || self.features_per_split > n_features {
            return Err(Error::Config(format!(
                "features_per_split must be in 1..={n_features}"
            )));
        }
        Ok(())
    }
}

/// Logistic-regression hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// L2 penalty on weights (never on intercepts).
    pub l2: f64,
    /// Recorded for provenance; full-batch descent from zero weights has no
    /// stochastic component.
    pub seed: u64,
    /// Standardize features to training mean/std (zero-std columns map to 0).
    pub standardize: bool,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            epochs: 500,
            l2: 1e-3,
            seed: 0,
            standardize: true,
        }
    }
}

impl LogisticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be > 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.l2.is_nan() || self.l2 < 0.0 {
            return Err(Error::Config("l2 must be >= 0".into()));
        }
        Ok(())
    }
}

/// Which learner produced a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Forest,
    Logistic,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Forest => "forest",
            ModelKind::Logistic => "logistic",
        })
    }
}

/// Training configuration snapshot kept in model metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModelConfig {
    Forest(ForestConfig),
    Logistic(LogisticConfig),
}

/// Provenance recorded with every trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub config: ModelConfig,
    pub n_train: usize,
    pub class_counts: Vec<usize>,
    /// Classes with zero training examples; they can never win a vote.
    pub absent_classes: Vec<usize>,
    pub data_range: Option<DateRange>,
}

/// Learned parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModelParams {
    Forest(Forest),
    Logistic(Logistic),
}

/// A trained multi-class model plus its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub classes: usize,
    pub feature_names: Vec<String>,
    pub params: ModelParams,
    pub metadata: ModelMetadata,
}

/// Current on-disk model format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    model: TrainedModel,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Forest(_) => ModelKind::Forest,
            ModelParams::Logistic(_) => ModelKind::Logistic,
        }
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Predicts a class and per-class probability vector for a canonical
    /// feature vector.
    pub fn predict(&self, features: &FeatureVector) -> Result<(usize, Vec<f64>)> {
        if self.n_features() != FEATURE_COUNT || self.feature_names != feature_names() {
            return Err(Error::Dimension(format!(
                "model was trained on {} non-canonical features",
                self.n_features()
            )));
        }
        self.predict_row(features.values())
    }

    /// Predicts from a raw row in the model's feature order.
    pub fn predict_row(&self, row: &[f64]) -> Result<(usize, Vec<f64>)> {
        if row.len() != self.n_features() {
            return Err(Error::Dimension(format!(
                "expected {} features, got {}",
                self.n_features(),
                row.len()
            )));
        }
        let probabilities = match &self.params {
            ModelParams::Forest(f) => f.probabilities(row),
            ModelParams::Logistic(l) => l.probabilities(row),
        };
        Ok((argmax_tie_lower(&probabilities), probabilities))
    }

    /// Per-feature importance, normalized to sum to 1 when any signal exists.
    ///
    /// Forests report total Gini impurity decrease per feature across all
    /// trees. Logistic models report |standardized weight| summed over
    /// classes, a different quantity, flagged as such wherever ranks are
    /// aggregated.
    pub fn feature_importance(&self) -> Vec<f64> {
        match &self.params {
            ModelParams::Forest(f) => f.importance.clone(),
            ModelParams::Logistic(l) => l.weight_importance(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(json: &str) -> Result<TrainedModel> {
        let file: ModelFile = serde_json::from_str(json)?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "unsupported model format version {}",
                file.format_version
            )));
        }
        Ok(file.model)
    }
}

/// Index of the maximum value; ties resolve to the lower index.
pub(crate) fn argmax_tie_lower(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Names attached to a freshly trained model: the canonical grid when the
/// width matches, positional names otherwise (tests and ad-hoc matrices).
pub(crate) fn names_for_width(n_features: usize) -> Vec<String> {
    if n_features == FEATURE_COUNT {
        feature_names().to_vec()
    } else {
        (0..n_features).map(|i| format!("f{i}")).collect()
    }
}

pub(crate) fn validate_training_inputs(
    x: &[Vec<f64>],
    y: &[usize],
    classes: usize,
) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::InsufficientData("empty training matrix".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "{} rows vs {} labels",
            x.len(),
            y.len()
        )));
    }
    if classes < 2 {
        return Err(Error::Config("need at least 2 classes".into()));
    }
    if x.len() < classes {
        return Err(Error::InsufficientData(format!(
            "{} rows cannot cover {} classes",
            x.len(),
            classes
        )));
    }
    let width = x[0].len();
    if width == 0 || x.iter().any(|row| row.len() != width) {
        return Err(Error::Dimension("ragged or empty feature rows".into()));
    }
    if let Some(&bad) = y.iter().find(|&&label| label >= classes) {
        return Err(Error::Dimension(format!(
            "label {bad} outside 0..{classes}"
        )));
    }
    Ok(width)
}

pub(crate) fn class_counts(y: &[usize], classes: usize) -> Vec<usize> {
    let mut counts = vec![0usize; classes];
    for &label in y {
        counts[label] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_toward_lower_index() {
        assert_eq!(argmax_tie_lower(&[0.5, 0.5]), 0);
        assert_eq!(argmax_tie_lower(&[0.1, 0.4, 0.4, 0.1]), 1);
        assert_eq!(argmax_tie_lower(&[0.0, 1.0, 0.0]), 1);
    }

    #[test]
    fn model_json_round_trips_and_checks_version() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let y: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        let config = ForestConfig {
            n_trees: 3,
            features_per_split: 2,
            ..Default::default()
        };
        let model = train_forest(&x, &y, 2, &config).unwrap();
        let json = model.to_json().unwrap();
        let restored = TrainedModel::from_json(&json).unwrap();
        assert_eq!(model, restored);
        for probe in &x {
            assert_eq!(
                model.predict_row(probe).unwrap(),
                restored.predict_row(probe).unwrap()
            );
        }
        let bad = json.replace("\"format_version\": 1", "\"format_version\": 99");
        assert!(TrainedModel::from_json(&bad).is_err());
    }

    #[test]
    fn training_input_validation() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(validate_training_inputs(&[], &[], 2).is_err());
        assert!(validate_training_inputs(&x, &[0], 2).is_err());
        assert!(validate_training_inputs(&x, &[0, 3], 2).is_err());
        assert!(validate_training_inputs(&x, &[0, 1], 3).is_err());
        assert_eq!(validate_training_inputs(&x, &[0, 1], 2).unwrap(), 1);
    }
}
