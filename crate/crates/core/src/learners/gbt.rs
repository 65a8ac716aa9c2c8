// SPDX-License-Identifier: MIT OR Apache-2.0

//! Multiclass gradient boosting: one regression tree per class and round on
//! the softmax cross-entropy residuals.

use serde::{Deserialize, Serialize};

use super::argmax_scores;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub max_depth: usize,
    pub shrinkage: f64,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum RegNode {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RegTree {
    nodes: Vec<RegNode>,
}

impl RegTree {
    fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                RegNode::Leaf(v) => return *v,
                RegNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

struct RegBuilder<'a> {
    x: &'a [Vec<f64>],
    r: &'a [f64],
    k_factor: f64,
    max_depth: usize,
    nodes: Vec<RegNode>,
}

impl RegBuilder<'_> {
    /// Newton-style leaf value for the multiclass deviance.
    fn leaf_value(&self, idx: &[usize]) -> f64 {
        let num: f64 = idx.iter().map(|&i| self.r[i]).sum();
        let den: f64 = idx.iter().map(|&i| self.r[i].abs() * (1.0 - self.r[i].abs())).sum();
        if den < 1e-12 {
            0.0
        } else {
            self.k_factor * num / den
        }
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(RegNode::Leaf(self.leaf_value(&idx)));
        if depth >= self.max_depth || idx.len() < 2 {
            return id;
        }
        let n = idx.len();
        let total: f64 = idx.iter().map(|&i| self.r[i]).sum();
        let parent_gain = total * total / n as f64;
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = idx.clone();
        for f in 0..self.x[0].len() {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut sum_l = 0.0;
            for k in 0..n - 1 {
                sum_l += self.r[sorted[k]];
                let (lo, hi) = (self.x[sorted[k]][f], self.x[sorted[k + 1]][f]);
                if !(hi > lo) {
                    continue;
                }
                let (nl, nr) = ((k + 1) as f64, (n - k - 1) as f64);
                let sum_r = total - sum_l;
                let gain = sum_l * sum_l / nl + sum_r * sum_r / nr;
                if best.map_or(true, |(g, _, _)| gain > g + 1e-12) {
                    best = Some((gain, f, lo + (hi - lo) / 2.0));
                }
            }
        }
        let Some((gain, feature, threshold)) = best else {
            return id;
        };
        if gain <= parent_gain + 1e-12 {
            return id;
        }
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = RegNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gbt {
    init: Vec<f64>,
    /// Per round: one tree per class and the accepted step multiplier.
    rounds: Vec<(Vec<RegTree>, f64)>,
    /// Training loss before the first round and after each accepted round.
    pub loss_history: Vec<f64>,
}

fn softmax_loss(scores: &[Vec<f64>], y: &[usize]) -> f64 {
    scores
        .iter()
        .zip(y)
        .map(|(s, &c)| {
            let m = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + s.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            lse - s[c]
        })
        .sum::<f64>()
        / y.len() as f64
}

fn softmax(s: &[f64]) -> Vec<f64> {
    let m = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = s.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Step halvings tried before boosting stops.
const MAX_BACKTRACK: usize = 8;

impl Gbt {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: GbtParams) -> Self {
        let n = y.len();
        let mut freq = vec![1.0; n_classes];
        for &c in y {
            freq[c] += 1.0;
        }
        let total: f64 = freq.iter().sum();
        let log_prior: Vec<f64> = freq.iter().map(|f| (f / total).ln()).collect();
        let centre = log_prior.iter().sum::<f64>() / n_classes as f64;
        let init: Vec<f64> = log_prior.iter().map(|v| v - centre).collect();

        let mut scores = vec![init.clone(); n];
        let mut loss = softmax_loss(&scores, y);
        let mut model = Gbt {
            init,
            rounds: Vec::new(),
            loss_history: vec![loss],
        };
        let k_factor = (n_classes as f64 - 1.0) / n_classes as f64;
        let all: Vec<usize> = (0..n).collect();
        for _ in 0..params.rounds {
            let probs: Vec<Vec<f64>> = scores.iter().map(|s| softmax(s)).collect();
            let trees: Vec<RegTree> = (0..n_classes)
                .map(|k| {
                    let r: Vec<f64> = (0..n)
                        .map(|i| f64::from(u8::from(y[i] == k)) - probs[i][k])
                        .collect();
                    let mut b = RegBuilder {
                        x,
                        r: &r,
                        k_factor,
                        max_depth: params.max_depth,
                        nodes: Vec::new(),
                    };
                    b.build(all.clone(), 0);
                    RegTree { nodes: b.nodes }
                })
                .collect();
            let updates: Vec<Vec<f64>> = x
                .iter()
                .map(|row| trees.iter().map(|t| t.predict(row)).collect())
                .collect();
            let mut step = params.shrinkage;
            let mut accepted = None;
            for _ in 0..=MAX_BACKTRACK {
                let trial: Vec<Vec<f64>> = scores
                    .iter()
                    .zip(&updates)
                    .map(|(s, u)| s.iter().zip(u).map(|(a, b)| a + step * b).collect())
                    .collect();
                let trial_loss = softmax_loss(&trial, y);
                if trial_loss < loss {
                    accepted = Some((trial, trial_loss));
                    break;
                }
                step /= 2.0;
            }
            let Some((trial, trial_loss)) = accepted else {
                break;
            };
            let improvement = loss - trial_loss;
            scores = trial;
            loss = trial_loss;
            model.rounds.push((trees, step));
            model.loss_history.push(loss);
            if improvement < 1e-10 * loss.max(1e-12) {
                break;
            }
        }
        model
    }

    pub fn scores(&self, row: &[f64]) -> Vec<f64> {
        let mut s = self.init.clone();
        for (trees, step) in &self.rounds {
            for (k, t) in trees.iter().enumerate() {
                s[k] += step * t.predict(row);
            }
        }
        s
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax_scores(&self.scores(row))
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Vec<Vec<f64>>, Vec<usize>) {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![(i % 20) as f64, (i * 7 % 13) as f64]).collect();
        let y: Vec<usize> = x.iter().map(|r| usize::from(r[0] > 9.0) + usize::from(r[1] > 8.0)).collect();
        (x, y)
    }

    #[test]
    fn loss_never_increases() {
        let (x, y) = data();
        let m = Gbt::fit(&x, &y, 3, GbtParams { max_depth: 2, shrinkage: 0.3, rounds: 50 });
        for w in m.loss_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(m.loss_history.last().unwrap() < &m.loss_history[0]);
    }

    #[test]
    fn fits_axis_aligned_classes() {
        let (x, y) = data();
        let m = Gbt::fit(&x, &y, 3, GbtParams { max_depth: 2, shrinkage: 0.3, rounds: 100 });
        let correct = x.iter().zip(&y).filter(|(r, c)| m.predict(r) == **c).count();
        assert_eq!(correct, y.len());
    }
}
