// SPDX-License-Identifier: MIT OR Apache-2.0

//! Bagged trees and random forests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::argmax_first;
use super::tree::{DecisionTree, TreeParams};
use crate::stats::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
}

impl Forest {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: ForestParams, seed: u64) -> Self {
        let n = y.len();
        let trees = (0..params.n_trees)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[t as u64]));
                let idx: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit(x, y, n_classes, idx, params.tree, Some(&mut rng))
            })
            .collect();
        Forest { trees, n_classes }
    }

    /// Majority vote; ties go to the smallest class index.
    pub fn predict(&self, row: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict(row)] += 1;
        }
        argmax_first(&votes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unsampled_tree_matches_cart() {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i * 17 % 40) as f64, (i * 7 % 11) as f64, (i % 5) as f64])
            .collect();
        let y: Vec<usize> = (0..40).map(|i| (i * 31 % 7 % 3) as usize).collect();
        let tree_params = TreeParams {
            max_depth: Some(4),
            min_leaf: 1,
            max_features: Some(3),
        };
        let forest = Forest::fit(
            &x,
            &y,
            3,
            ForestParams {
                n_trees: 1,
                tree: tree_params,
                bootstrap: false,
            },
            9,
        );
        let cart = DecisionTree::fit(&x, &y, 3, (0..40).collect(), TreeParams { max_features: None, ..tree_params }, None);
        for row in &x {
            assert_eq!(forest.predict(row), cart.predict(row));
        }
    }

    #[test]
    fn vote_ties_go_to_first_class() {
        let leaf = |c| DecisionTree {
            nodes: vec![super::super::tree::Node::Leaf { class: c }],
        };
        let f = Forest {
            trees: vec![leaf(2), leaf(1), leaf(2), leaf(1)],
            n_classes: 3,
        };
        assert_eq!(f.predict(&[0.0]), 1);
    }
}
