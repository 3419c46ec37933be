//! CART-style random forest with Gini impurity splits.
//!
//! Trees grow on bootstrap resamples; each node scans a random subset of
//! features and takes the split with the largest impurity decrease, with
//! every tie broken deterministically (lower feature index, then lower
//! threshold, and majority votes toward the lower class). Bootstrap and
//! feature sampling are keyed per tree from the model seed, so per-tree
//! parallel training cannot change the result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::SplitMix64;

use super::{
    argmax_tie_lower, class_counts, names_for_width, validate_training_inputs, ForestConfig,
    ModelConfig, ModelMetadata, ModelParams, TrainedModel,
};

/// One node of a fitted tree, indexing into the tree's node arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "node")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

/// A single fitted decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> usize {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { class } => return *class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

/// A fitted forest: trees plus aggregated Gini importance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub classes: usize,
    /// Mean-decrease-impurity per feature, normalized to sum to 1 when any
    /// split occurred; all zeros otherwise.
    pub importance: Vec<f64>,
}

impl Forest {
    /// Vote fractions across trees.
    pub fn probabilities(&self, row: &[f64]) -> Vec<f64> {
        let mut votes = vec![0usize; self.classes];
        for tree in &self.trees {
            votes[tree.predict(row)] += 1;
        }
        let total = self.trees.len() as f64;
        votes.into_iter().map(|v| v as f64 / total).collect()
    }
}

struct TreeBuilder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    classes: usize,
    n_features: usize,
    config: &'a ForestConfig,
    rng: SplitMix64,
    nodes: Vec<TreeNode>,
    /// Impurity decrease accumulated per feature, weighted by node share of
    /// the root sample.
    importance: Vec<f64>,
    root_size: f64,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    /// Index into the per-feature sorted order where the split falls.
    position: usize,
}

impl<'a> TreeBuilder<'a> {
    fn leaf(&mut self, counts: &[usize]) -> usize {
        let class = argmax_tie_lower(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());
        self.nodes.push(TreeNode::Leaf { class });
        self.nodes.len() - 1
    }

    fn grow(&mut self, indices: &mut Vec<usize>, depth: usize) -> usize {
        let n = indices.len();
        let mut counts = vec![0usize; self.classes];
        for &i in indices.iter() {
            counts[self.y[i]] += 1;
        }
        let pure = counts.contains(&n);
        if depth >= self.config.max_depth || n < 2 * self.config.min_samples_leaf || pure {
            return self.leaf(&counts);
        }

        let candidates = self.sample_features();
        let parent_gini = gini(&counts, n);
        let mut best: Option<BestSplit> = None;
        let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(n);
        let mut left_counts = vec![0usize; self.classes];
        let mut right_counts = vec![0usize; self.classes];
        for &feature in &candidates {
            keyed.clear();
            keyed.extend(indices.iter().map(|&i| (self.x[i][feature], i)));
            keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            left_counts.fill(0);
            right_counts.copy_from_slice(&counts);
            for pos in 1..n {
                let moved = self.y[keyed[pos - 1].1];
                left_counts[moved] += 1;
                right_counts[moved] -= 1;
                let (lo, hi) = (keyed[pos - 1].0, keyed[pos].0);
                if lo == hi {
                    continue;
                }
                if pos < self.config.min_samples_leaf || n - pos < self.config.min_samples_leaf {
                    continue;
                }
                let weighted = (pos as f64 / n as f64) * gini(&left_counts, pos)
                    + ((n - pos) as f64 / n as f64) * gini(&right_counts, n - pos);
                let gain = parent_gini - weighted;
                // Strict improvement keeps the first (lowest feature, lowest
                // threshold) candidate on ties.
                if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                    best = Some(BestSplit {
                        feature,
                        threshold: lo + (hi - lo) / 2.0,
                        gain,
                        position: pos,
                    });
                }
            }
        }

        let Some(split) = best else {
            return self.leaf(&counts);
        };
        self.importance[split.feature] += (n as f64 / self.root_size) * split.gain;

        keyed.clear();
        keyed.extend(indices.iter().map(|&i| (self.x[i][split.feature], i)));
        keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        indices.clear();
        let mut left: Vec<usize> = keyed[..split.position].iter().map(|&(_, i)| i).collect();
        let mut right: Vec<usize> = keyed[split.position..].iter().map(|&(_, i)| i).collect();

        // Reserve the slot so child indices are stable.
        self.nodes.push(TreeNode::Leaf { class: 0 });
        let at = self.nodes.len() - 1;
        let left_node = self.grow(&mut left, depth + 1);
        let right_node = self.grow(&mut right, depth + 1);
        self.nodes[at] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_node,
            right: right_node,
        };
        at
    }

    /// `features_per_split` distinct feature indices, in ascending order.
    fn sample_features(&mut self) -> Vec<usize> {
        let k = self.config.features_per_split.min(self.n_features);
        let mut pool: Vec<usize> = (0..self.n_features).collect();
        for i in 0..k {
            let j = i + self.rng.next_below(self.n_features - i);
            pool.swap(i, j);
        }
        let mut chosen = pool[..k].to_vec();
        chosen.sort_unstable();
        chosen
    }
}

fn grow_tree(
    x: &[Vec<f64>],
    y: &[usize],
    classes: usize,
    n_features: usize,
    config: &ForestConfig,
    tree_index: usize,
) -> (Tree, Vec<f64>) {
    let mut rng = SplitMix64::keyed(config.seed, &[0xF0_4E57, tree_index as u64]);
    let mut indices: Vec<usize> = if config.bootstrap {
        (0..x.len()).map(|_| rng.next_below(x.len())).collect()
    } else {
        (0..x.len()).collect()
    };
    let mut builder = TreeBuilder {
        x,
        y,
        classes,
        n_features,
        config,
        rng,
        nodes: Vec::new(),
        importance: vec![0.0; n_features],
        root_size: indices.len() as f64,
    };
    let root = builder.grow(&mut indices, 0);
    debug_assert_eq!(root, 0);
    (
        Tree {
            nodes: builder.nodes,
        },
        builder.importance,
    )
}

/// Trains a random forest on rows `x` with labels `y` in `0..classes`.
pub fn train_forest(
    x: &[Vec<f64>],
    y: &[usize],
    classes: usize,
    config: &ForestConfig,
) -> Result<TrainedModel> {
    let n_features = validate_training_inputs(x, y, classes)?;
    config.validate(n_features)?;

    let grown: Vec<(Tree, Vec<f64>)> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| grow_tree(x, y, classes, n_features, config, t))
        .collect();

    let mut importance = vec![0.0; n_features];
    let mut trees = Vec::with_capacity(config.n_trees);
    for (tree, imp) in grown {
        trees.push(tree);
        for (total, part) in importance.iter_mut().zip(imp) {
            *total += part;
        }
    }
    let total: f64 = importance.iter().sum();
    if total > 0.0 {
        for v in &mut importance {
            *v /= total;
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
        params: ModelParams::Forest(Forest {
            trees,
            classes,
            importance,
        }),
        metadata: ModelMetadata {
            config: ModelConfig::Forest(*config),
            n_train: x.len(),
            class_counts: counts,
            absent_classes: absent,
            data_range: None,
        },
    })
}
