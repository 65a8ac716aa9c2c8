// SPDX-License-Identifier: MIT OR Apache-2.0

//! Meta-learners that map feature vectors to a recommended forecaster.
//!
//! Labels are handled internally as indices into the sorted label set of the
//! training data, so "smallest index" and registry order coincide for every
//! tie-break.

pub mod confusion;
pub mod cv;
pub mod forest;
pub mod gbt;
pub mod mlp;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::MethodId;

pub use confusion::{confusion_matrix, ConfusionMatrix};
pub use cv::{train, train_with_grid, CvSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    DecisionTree,
    RandomForest,
    Treebag,
    Gbt,
    Mlp,
    Svm,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 6] = [
        LearnerKind::DecisionTree,
        LearnerKind::RandomForest,
        LearnerKind::Treebag,
        LearnerKind::Gbt,
        LearnerKind::Mlp,
        LearnerKind::Svm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::DecisionTree => "decision_tree",
            LearnerKind::RandomForest => "random_forest",
            LearnerKind::Treebag => "treebag",
            LearnerKind::Gbt => "gbt",
            LearnerKind::Mlp => "mlp",
            LearnerKind::Svm => "svm",
        }
    }

    /// Hyperparameter grid for `p` input features, in tie-break order.
    pub fn default_grid(self, p: usize) -> Vec<HyperParams> {
        let p = p.max(1);
        match self {
            LearnerKind::DecisionTree => [Some(2), Some(4), Some(8), None]
                .into_iter()
                .flat_map(|d| [1, 3, 5].map(|m| HyperParams::DecisionTree { max_depth: d, min_leaf: m }))
                .collect(),
            LearnerKind::Treebag => [1, 5]
                .map(|m| HyperParams::Treebag { n_trees: 50, min_leaf: m })
                .to_vec(),
            LearnerKind::RandomForest => {
                let mtry = (p as f64).sqrt().ceil() as usize;
                [1, 5]
                    .map(|m| HyperParams::RandomForest { n_trees: 100, mtry, min_leaf: m })
                    .to_vec()
            }
            LearnerKind::Gbt => [1, 2, 3]
                .into_iter()
                .flat_map(|d| {
                    [0.05, 0.1, 0.3].map(|s| HyperParams::Gbt {
                        max_depth: d,
                        shrinkage: s,
                        rounds: 200,
                    })
                })
                .collect(),
            LearnerKind::Mlp => [8, 16, 32]
                .map(|h| HyperParams::Mlp { hidden: h, epochs: 2000 })
                .to_vec(),
            LearnerKind::Svm => [0.1, 1.0, 10.0]
                .into_iter()
                .flat_map(|c| [1.0, 2.0].map(|g| HyperParams::Svm { c, gamma: g / p as f64 }))
                .collect(),
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown learner `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum HyperParams {
    DecisionTree { max_depth: Option<usize>, min_leaf: usize },
    Treebag { n_trees: usize, min_leaf: usize },
    RandomForest { n_trees: usize, mtry: usize, min_leaf: usize },
    Gbt { max_depth: usize, shrinkage: f64, rounds: usize },
    Mlp { hidden: usize, epochs: usize },
    Svm { c: f64, gamma: f64 },
    Constant,
}

/// Where a dataset came from: pool, measure and reduction variant.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub pool: String,
    pub measure: String,
    pub reduction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaDataset {
    pub ids: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<MethodId>,
    pub feature_names: Vec<String>,
    pub provenance: Provenance,
}

impl MetaDataset {
    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidArgument("empty meta-dataset".into()));
        }
        if self.features.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                actual: self.labels.len(),
            });
        }
        let p = self.feature_names.len();
        if let Some(r) = self.features.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: r.len(),
            });
        }
        if self.features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite meta-feature".into()));
        }
        Ok(())
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<MethodId> {
        let mut c = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }
}

/// Per-column z-scoring fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let n = x.len().max(1) as f64;
        let p = x.first().map_or(0, Vec::len);
        let mean: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let scale = (0..p)
            .map(|j| {
                let var = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                let sd = var.sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// First index of the largest count.
pub(crate) fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, c) in counts.iter().enumerate() {
        if *c > counts[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmax_scores(s: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in s.iter().enumerate() {
        if *v > s[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedModel {
    Constant(usize),
    Tree(tree::DecisionTree),
    Forest(forest::Forest),
    Gbt(gbt::Gbt),
    Mlp(mlp::Mlp),
    Svm(svm::Svm),
}

impl FittedModel {
    pub fn fit(hp: &HyperParams, x: &[Vec<f64>], y: &[usize], n_classes: usize, seed: u64) -> Self {
        let mut present: Vec<usize> = y.to_vec();
        present.sort_unstable();
        present.dedup();
        if present.len() <= 1 {
            return FittedModel::Constant(present.first().copied().unwrap_or(0));
        }
        let all = || (0..y.len()).collect::<Vec<_>>();
        match *hp {
            HyperParams::Constant => FittedModel::Constant(majority(y, n_classes)),
            HyperParams::DecisionTree { max_depth, min_leaf } => FittedModel::Tree(tree::DecisionTree::fit(
                x,
                y,
                n_classes,
                all(),
                tree::TreeParams {
                    max_depth,
                    min_leaf,
                    max_features: None,
                },
                None,
            )),
            HyperParams::Treebag { n_trees, min_leaf } => FittedModel::Forest(forest::Forest::fit(
                x,
                y,
                n_classes,
                forest::ForestParams {
                    n_trees,
                    bootstrap: true,
                    tree: tree::TreeParams {
                        max_depth: None,
                        min_leaf,
                        max_features: None,
                    },
                },
                seed,
            )),
            HyperParams::RandomForest { n_trees, mtry, min_leaf } => FittedModel::Forest(forest::Forest::fit(
                x,
                y,
                n_classes,
                forest::ForestParams {
                    n_trees,
                    bootstrap: true,
                    tree: tree::TreeParams {
                        max_depth: None,
                        min_leaf,
                        max_features: Some(mtry),
                    },
                },
                seed,
            )),
            HyperParams::Gbt { max_depth, shrinkage, rounds } => FittedModel::Gbt(gbt::Gbt::fit(
                x,
                y,
                n_classes,
                gbt::GbtParams {
                    max_depth,
                    shrinkage,
                    rounds,
                },
            )),
            HyperParams::Mlp { hidden, epochs } => FittedModel::Mlp(mlp::Mlp::fit(
                x,
                y,
                n_classes,
                mlp::MlpParams {
                    epochs,
                    ..mlp::MlpParams::with_hidden(hidden)
                },
                seed,
            )),
            HyperParams::Svm { c, gamma } => {
                FittedModel::Svm(svm::Svm::fit(x, y, n_classes, svm::SvmParams::new(c, gamma)))
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        match self {
            FittedModel::Constant(c) => *c,
            FittedModel::Tree(t) => t.predict(row),
            FittedModel::Forest(f) => f.predict(row),
            FittedModel::Gbt(g) => g.predict(row),
            FittedModel::Mlp(m) => m.predict(row),
            FittedModel::Svm(s) => s.predict(row),
        }
    }
}

fn majority(y: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0; n_classes.max(1)];
    for &c in y {
        counts[c] += 1;
    }
    argmax_first(&counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub learner: LearnerKind,
    pub classes: Vec<MethodId>,
    pub n_features: usize,
    pub hyperparams: HyperParams,
    pub cv_accuracy: f64,
    pub model: FittedModel,
}

/// The JSON-facing part of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub learner: LearnerKind,
    pub hyperparams: HyperParams,
    pub cv_accuracy: f64,
    pub classes: Vec<MethodId>,
}

impl TrainedModel {
    pub fn predict(&self, row: &[f64]) -> Result<MethodId> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: row.len(),
            });
        }
        Ok(self.classes[self.model.predict(row)])
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<MethodId>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn metadata(&self) -> ModelMetadata {
        ModelMetadata {
            learner: self.learner,
            hyperparams: self.hyperparams,
            cv_accuracy: self.cv_accuracy,
            classes: self.classes.clone(),
        }
    }
}
