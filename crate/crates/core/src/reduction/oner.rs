// SPDX-License-Identifier: MIT OR Apache-2.0

//! One-rule feature weighting on equal-frequency bins.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{feature_index, FEATURE_NAMES};

pub const DEFAULT_BINS: usize = 5;

/// The twelve-feature preset.
pub const PAPER12: [&str; 12] = [
    "curvature",
    "diff1_acf10",
    "e_acf1",
    "e_acf10",
    "entropy",
    "seasonal_strength1",
    "seasonal_strength2",
    "trend",
    "x_acf1",
    "x_acf10",
    "seas_acf1",
    "linearity",
];

/// Training accuracy of the one-rule classifier built on each feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights {
    pub weights: Vec<(String, f64)>,
}

impl FeatureWeights {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.weights.iter().find(|(n, _)| n == name).map(|(_, w)| *w)
    }

    /// Names sorted by weight, highest first; ties by canonical feature order.
    pub fn ranked(&self) -> Vec<String> {
        let order = |n: &str| feature_index(n).unwrap_or(usize::MAX);
        let mut v: Vec<&(String, f64)> = self.weights.iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(order(&a.0).cmp(&order(&b.0))));
        v.into_iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature", "weight"])?;
        for (n, v) in &self.weights {
            w.write_record([n.clone(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Upper bin edges at ranks `ceil(b * n / bins) - 1`, deduplicated.
fn bin_edges(column: &[f64], bins: usize) -> Vec<f64> {
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut edges: Vec<f64> = (1..bins)
        .map(|b| sorted[((b * n).div_ceil(bins)).max(1) - 1])
        .collect();
    edges.dedup();
    edges
}

/// Right-closed bin index: the number of edges strictly below `x`.
fn bin_of(edges: &[f64], x: f64) -> usize {
    edges.partition_point(|e| *e < x)
}

/// Accuracy of the majority-label-per-bin rule. Labels are class indices;
/// majority ties go to the smallest index.
pub fn oner_accuracy(column: &[f64], labels: &[usize], bins: usize) -> f64 {
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let edges = bin_edges(column, bins.max(1));
    let mut counts = vec![vec![0usize; n_classes]; edges.len() + 1];
    for (x, &y) in column.iter().zip(labels) {
        counts[bin_of(&edges, *x)][y] += 1;
    }
    let correct: usize = counts
        .iter()
        .map(|c| c.iter().copied().max().unwrap_or(0))
        .sum();
    correct as f64 / labels.len() as f64
}

/// One weight per column of `rows`, named by `names`.
pub fn oner_weights(
    names: &[&str],
    rows: &[Vec<f64>],
    labels: &[usize],
    bins: usize,
) -> Result<FeatureWeights> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            actual: labels.len(),
        });
    }
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidArgument(
            "feature weighting needs at least two distinct labels".into(),
        ));
    }
    let weights = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let column = rows
                .iter()
                .map(|r| {
                    r.get(j).copied().ok_or(Error::DimensionMismatch {
                        expected: names.len(),
                        actual: r.len(),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((name.to_string(), oner_accuracy(&column, labels, bins)))
        })
        .collect::<Result<_>>()?;
    Ok(FeatureWeights { weights })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    TopK(usize),
    Named(Vec<String>),
}

impl SelectionMode {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper12" => Ok(SelectionMode::Named(PAPER12.iter().map(|s| s.to_string()).collect())),
            other => Err(Error::InvalidArgument(format!("unknown feature preset `{other}`"))),
        }
    }
}

pub fn select_features(weights: &FeatureWeights, mode: &SelectionMode) -> Result<Vec<String>> {
    match mode {
        SelectionMode::TopK(k) => Ok(weights.ranked().into_iter().take(*k).collect()),
        SelectionMode::Named(names) => {
            for n in names {
                if !FEATURE_NAMES.contains(&n.as_str()) {
                    return Err(Error::UnknownFeature(n.clone()));
                }
            }
            Ok(names.clone())
        }
    }
}
