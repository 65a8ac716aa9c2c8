// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pools::{PoolId, PoolSpec};
use crate::accuracy::{Measure, RecordTable};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{MetaDataset, Provenance};
use crate::reduction::{
    fit_pca, oner_weights, pca_transform, select_features, FeatureWeights, PcaModel,
    SelectionMode, DEFAULT_BINS, DEFAULT_CUMVAR,
};
use crate::series::CollectionSplit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Raw,
    FeatureSelection,
    Pca,
}

impl Reduction {
    pub const ALL: [Reduction; 3] = [Reduction::Raw, Reduction::FeatureSelection, Reduction::Pca];

    pub fn name(self) -> &'static str {
        match self {
            Reduction::Raw => "raw",
            Reduction::FeatureSelection => "feature_selection",
            Reduction::Pca => "pca",
        }
    }

    /// Column suffix used in the CSV tables.
    pub fn short(self) -> &'static str {
        match self {
            Reduction::Raw => "raw",
            Reduction::FeatureSelection => "fs",
            Reduction::Pca => "pca",
        }
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Reduction::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s || r.short() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown reduction `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReductionConfig {
    pub bins: usize,
    /// Named feature set tried first; `None` means pure top-k.
    pub preset: Option<String>,
    /// Size of the selected set. Preset names that are constant in the data
    /// are replaced by the next best-weighted features.
    pub top_k: usize,
    pub pca_threshold: f64,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            bins: DEFAULT_BINS,
            preset: Some("paper12".into()),
            top_k: 12,
            pca_threshold: DEFAULT_CUMVAR,
        }
    }
}

/// One meta-learning input: a pool, a measure and a reduction applied to
/// the training and test partitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputVariant {
    pub pool: PoolSpec,
    pub measure: Measure,
    pub reduction: Reduction,
    pub train: MetaDataset,
    pub test: MetaDataset,
    /// OneR weights of the training rows, for `feature_selection`.
    pub weights: Option<FeatureWeights>,
    pub pca: Option<PcaModel>,
}

/// Labels are the best pool member per series. Every series in the split
/// must have a usable record for every pool member.
fn labels(
    table: &RecordTable,
    ids: &[String],
    pool: &PoolSpec,
    measure: Measure,
) -> Result<Vec<crate::forecast::MethodId>> {
    ids.iter()
        .map(|id| {
            for m in &pool.members {
                if table.value(id, *m, measure)?.is_none() {
                    return Err(Error::Fit(format!("{m} failed on `{id}` ({measure})")));
                }
            }
            table.best_label(id, &pool.members, measure)
        })
        .collect()
}

fn fallback_weights(names: &[&str]) -> FeatureWeights {
    FeatureWeights {
        weights: names.iter().map(|n| (n.to_string(), 0.0)).collect(),
    }
}

fn selected_columns(
    weights: &FeatureWeights,
    active: &[&str],
    cfg: &ReductionConfig,
) -> Result<Vec<String>> {
    let mut chosen: Vec<String> = match &cfg.preset {
        Some(p) => select_features(weights, &SelectionMode::preset(p)?)?
            .into_iter()
            .filter(|n| active.contains(&n.as_str()))
            .collect(),
        None => Vec::new(),
    };
    for name in weights.ranked() {
        if chosen.len() >= cfg.top_k {
            break;
        }
        if !chosen.contains(&name) {
            chosen.push(name);
        }
    }
    if chosen.is_empty() {
        return Err(Error::InvalidArgument("feature selection kept no columns".into()));
    }
    Ok(chosen)
}

/// Builds every (pool, measure, reduction) variant. The `basic` pool only
/// gets the raw reduction.
pub fn build_inputs(
    fm: &FeatureMatrix,
    table: &RecordTable,
    pools: &[PoolSpec],
    measures: &[Measure],
    reductions: &[Reduction],
    split: &CollectionSplit,
    cfg: &ReductionConfig,
) -> Result<Vec<InputVariant>> {
    let train_ids: Vec<String> = split.train_ids.iter().cloned().collect();
    let test_ids: Vec<String> = split.test_ids.iter().cloned().collect();
    let active = fm.active_columns();
    if active.is_empty() {
        return Err(Error::InvalidArgument("every feature column is constant".into()));
    }
    let train_raw = fm.select(&train_ids, &active)?;
    let test_raw = fm.select(&test_ids, &active)?;
    let names: Vec<String> = active.iter().map(|s| s.to_string()).collect();

    let mut out = Vec::new();
    for pool in pools {
        for &measure in measures {
            let train_labels = labels(table, &train_ids, pool, measure)?;
            let test_labels = labels(table, &test_ids, pool, measure)?;
            let mut classes = train_labels.clone();
            classes.sort();
            classes.dedup();
            let y: Vec<usize> = train_labels
                .iter()
                .map(|l| classes.binary_search(l).unwrap_or_default())
                .collect();

            let wanted: Vec<Reduction> = if pool.id == PoolId::Basic {
                vec![Reduction::Raw]
            } else {
                reductions.to_vec()
            };
            for reduction in wanted {
                let (mut weights, mut pca) = (None, None);
                let (feature_names, train_x, test_x) = match reduction {
                    Reduction::Raw => (names.clone(), train_raw.clone(), test_raw.clone()),
                    Reduction::FeatureSelection => {
                        let w = if classes.len() < 2 {
                            log::warn!(
                                "{}/{measure}: one training label; OneR weights fall back to feature order",
                                pool.id
                            );
                            fallback_weights(&active)
                        } else {
                            oner_weights(&active, &train_raw, &y, cfg.bins)?
                        };
                        let cols = selected_columns(&w, &active, cfg)?;
                        let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
                        let tr = fm.select(&train_ids, &refs)?;
                        let te = fm.select(&test_ids, &refs)?;
                        weights = Some(w);
                        (cols, tr, te)
                    }
                    Reduction::Pca => {
                        let model = fit_pca(&train_raw, cfg.pca_threshold)?;
                        let tr = pca_transform(&model, &train_raw)?;
                        let te = pca_transform(&model, &test_raw)?;
                        let cols = (1..=model.k).map(|j| format!("pc{j}")).collect();
                        pca = Some(model);
                        (cols, tr, te)
                    }
                };
                let provenance = Provenance {
                    pool: pool.id.name().into(),
                    measure: measure.name().into(),
                    reduction: reduction.name().into(),
                };
                out.push(InputVariant {
                    pool: pool.clone(),
                    measure,
                    reduction,
                    train: MetaDataset {
                        ids: train_ids.clone(),
                        features: train_x,
                        labels: train_labels.clone(),
                        feature_names: feature_names.clone(),
                        provenance: provenance.clone(),
                    },
                    test: MetaDataset {
                        ids: test_ids.clone(),
                        features: test_x,
                        labels: test_labels.clone(),
                        feature_names,
                        provenance,
                    },
                    weights,
                    pca,
                });
            }
        }
    }
    Ok(out)
}
