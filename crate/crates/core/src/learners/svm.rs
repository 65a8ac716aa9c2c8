// SPDX-License-Identifier: MIT OR Apache-2.0

//! RBF support vector classifier, one-vs-one, solved with SMO using the
//! maximal violating pair.

use serde::{Deserialize, Serialize};

use super::{argmax_first, Standardizer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl SvmParams {
    pub fn new(c: f64, gamma: f64) -> Self {
        SvmParams {
            c,
            gamma,
            tolerance: 1e-3,
            max_iter: 100_000,
        }
    }
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d).exp()
}

/// Binary machine between two classes; positive decision votes `pos`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub pos: usize,
    pub neg: usize,
    support: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    coef: Vec<f64>,
    rho: f64,
}

impl BinarySvm {
    /// `y` holds +1 / -1.
    fn fit(x: &[Vec<f64>], y: &[f64], params: &SvmParams, pos: usize, neg: usize) -> Self {
        let n = x.len();
        let c = params.c;
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = y[i] * y[j] * rbf(&x[i], &x[j], params.gamma);
                q[i * n + j] = v;
                q[j * n + i] = v;
            }
        }
        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
        let low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);
        for _ in 0..params.max_iter {
            let mut i = usize::MAX;
            let mut g_max = f64::NEG_INFINITY;
            let mut j = usize::MAX;
            let mut g_min = f64::INFINITY;
            for t in 0..n {
                let v = -y[t] * grad[t];
                if up(alpha[t], y[t]) && v > g_max {
                    g_max = v;
                    i = t;
                }
                if low(alpha[t], y[t]) && v < g_min {
                    g_min = v;
                    j = t;
                }
            }
            if i == usize::MAX || j == usize::MAX || g_max - g_min < params.tolerance {
                break;
            }
            let (old_i, old_j) = (alpha[i], alpha[j]);
            let (qii, qjj, qij) = (q[i * n + i], q[j * n + j], q[i * n + j]);
            if y[i] != y[j] {
                let quad = (qii + qjj + 2.0 * qij).max(1e-12);
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = (qii + qjj - 2.0 * qij).max(1e-12);
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for t in 0..n {
                grad[t] += q[t * n + i] * di + q[t * n + j] * dj;
            }
        }

        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free_sum, mut n_free) = (0.0, 0usize);
        for t in 0..n {
            let yg = y[t] * grad[t];
            if alpha[t] >= c {
                if y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if alpha[t] <= 0.0 {
                if y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free_sum += yg;
                n_free += 1;
            }
        }
        let rho = if n_free > 0 {
            free_sum / n_free as f64
        } else {
            (ub + lb) / 2.0
        };
        let (support, coef) = (0..n)
            .filter(|&t| alpha[t] > 0.0)
            .map(|t| (x[t].clone(), alpha[t] * y[t]))
            .unzip();
        BinarySvm {
            pos,
            neg,
            support,
            coef,
            rho,
        }
    }

    pub fn decision(&self, row: &[f64], gamma: f64) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, c)| c * rbf(s, row, gamma))
            .sum::<f64>()
            - self.rho
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Svm {
    pub params: SvmParams,
    pub n_classes: usize,
    pub scaler: Standardizer,
    pub machines: Vec<BinarySvm>,
}

impl Svm {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: SvmParams) -> Self {
        let scaler = Standardizer::fit(x);
        let z: Vec<Vec<f64>> = x.iter().map(|r| scaler.apply(r)).collect();
        let present: Vec<usize> = (0..n_classes).filter(|c| y.contains(c)).collect();
        let mut machines = Vec::new();
        for (a_pos, &a) in present.iter().enumerate() {
            for &b in &present[a_pos + 1..] {
                let (rows, signs): (Vec<Vec<f64>>, Vec<f64>) = z
                    .iter()
                    .zip(y)
                    .filter(|(_, c)| **c == a || **c == b)
                    .map(|(r, c)| (r.clone(), if *c == a { 1.0 } else { -1.0 }))
                    .unzip();
                machines.push(BinarySvm::fit(&rows, &signs, &params, a, b));
            }
        }
        Svm {
            params,
            n_classes,
            scaler,
            machines,
        }
    }

    /// Pairwise vote; ties go to the smallest class index.
    pub fn predict(&self, row: &[f64]) -> usize {
        let z = self.scaler.apply(row);
        let mut votes = vec![0usize; self.n_classes];
        for m in &self.machines {
            if m.decision(&z, self.params.gamma) > 0.0 {
                votes[m.pos] += 1;
            } else {
                votes[m.neg] += 1;
            }
        }
        argmax_first(&votes)
    }
}
