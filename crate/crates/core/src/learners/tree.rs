// SPDX-License-Identifier: MIT OR Apache-2.0

//! CART classification tree with Gini impurity.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::argmax_first;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features drawn per split; all of them when `None`.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_leaf: 1,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    params: TreeParams,
    rng: Option<&'a mut ChaCha8Rng>,
    nodes: Vec<Node>,
}

/// Best split found on one node: `(score, feature, threshold)`, lower score is better.
type Candidate = (f64, usize, f64);

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn features(&mut self) -> Vec<usize> {
        let p = self.x[0].len();
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < p => {
                let mut f = sample(rng, p, m.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize], parent: &[usize]) -> Option<Candidate> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let parent_sq: f64 = parent.iter().map(|&c| (c * c) as f64).sum();
        let parent_score = n as f64 - parent_sq / n as f64;
        let mut best: Option<Candidate> = None;
        let mut sorted = idx.to_vec();
        for f in self.features() {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left = vec![0usize; self.n_classes];
            let mut right = parent.to_vec();
            let (mut sq_l, mut sq_r) = (0.0, parent_sq);
            for k in 0..n - 1 {
                let c = self.y[sorted[k]];
                sq_l += (2 * left[c] + 1) as f64;
                sq_r -= (2 * right[c] - 1) as f64;
                left[c] += 1;
                right[c] -= 1;
                let (nl, nr) = (k + 1, n - k - 1);
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let (lo, hi) = (self.x[sorted[k]][f], self.x[sorted[k + 1]][f]);
                if !(hi > lo) {
                    continue;
                }
                let score = nl as f64 - sq_l / nl as f64 + nr as f64 - sq_r / nr as f64;
                if best.map_or(true, |(s, _, _)| score < s - 1e-12) {
                    best = Some((score, f, lo + (hi - lo) / 2.0));
                }
            }
        }
        best.filter(|(s, _, _)| *s < parent_score - 1e-12)
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: argmax_first(&counts),
        });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let deep = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || deep || idx.len() < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let Some((_, feature, threshold)) = self.best_split(&idx, &counts) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    /// Fits on the rows listed in `idx` (repeats allowed, as in a bootstrap sample).
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        idx: Vec<usize>,
        params: TreeParams,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Self {
        let mut b = Builder {
            x,
            y,
            n_classes,
            params,
            rng,
            nodes: Vec::new(),
        };
        b.build(idx, 0);
        DecisionTree { nodes: b.nodes }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit_all(x: &[Vec<f64>], y: &[usize], params: TreeParams) -> DecisionTree {
        let k = y.iter().max().unwrap() + 1;
        DecisionTree::fit(x, y, k, (0..y.len()).collect(), params, None)
    }

    #[test]
    fn memorises_training_rows() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i * 7 % 30) as f64, (i % 4) as f64]).collect();
        let y: Vec<usize> = (0..30).map(|i| (i * 13 % 3) as usize).collect();
        let t = fit_all(&x, &y, TreeParams::default());
        for (row, label) in x.iter().zip(&y) {
            assert_eq!(t.predict(row), *label);
        }
    }

    #[test]
    fn depth_limit_respected() {
        let x: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..64).map(|i| i % 2).collect();
        let t = fit_all(
            &x,
            &y,
            TreeParams {
                max_depth: Some(2),
                ..TreeParams::default()
            },
        );
        assert!(t.depth() <= 2);
    }

    #[test]
    fn min_leaf_blocks_tiny_splits() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let y = vec![0, 1, 1, 1];
        let t = fit_all(
            &x,
            &y,
            TreeParams {
                min_leaf: 2,
                ..TreeParams::default()
            },
        );
        // the only pure split isolates one row
        assert!(t.nodes.len() == 1 || t.depth() == 1);
        assert_eq!(t.predict(&[3.0]), 1);
    }

    #[test]
    fn stump_on_threshold() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..10).map(|i| usize::from(i >= 6)).collect();
        let t = fit_all(&x, &y, TreeParams::default());
        assert_eq!(t.nodes.len(), 3);
        match &t.nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(*threshold, 5.5),
            other => panic!("{other:?}"),
        }
    }
}
