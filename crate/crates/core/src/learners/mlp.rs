// SPDX-License-Identifier: MIT OR Apache-2.0

//! One-hidden-layer perceptron: tanh hidden units, softmax output, full-batch
//! gradient descent with momentum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_scores, Standardizer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub l2: f64,
}

impl MlpParams {
    pub fn with_hidden(hidden: usize) -> Self {
        MlpParams {
            hidden,
            epochs: 2000,
            learning_rate: 0.05,
            momentum: 0.9,
            l2: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpShape {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl MlpShape {
    /// Flat parameter layout: `W1 (hidden x inputs)`, `b1`, `W2 (outputs x hidden)`, `b2`.
    pub fn n_params(&self) -> usize {
        self.hidden * self.inputs + self.hidden + self.outputs * self.hidden + self.outputs
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let b1 = self.hidden * self.inputs;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.outputs * self.hidden;
        (b1, w2, b2)
    }
}

fn forward(shape: &MlpShape, params: &[f64], row: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (b1, w2, b2) = shape.offsets();
    let hidden: Vec<f64> = (0..shape.hidden)
        .map(|h| {
            let w = &params[h * shape.inputs..(h + 1) * shape.inputs];
            (params[b1 + h] + w.iter().zip(row).map(|(a, b)| a * b).sum::<f64>()).tanh()
        })
        .collect();
    let logits: Vec<f64> = (0..shape.outputs)
        .map(|k| {
            let w = &params[w2 + k * shape.hidden..w2 + (k + 1) * shape.hidden];
            params[b2 + k] + w.iter().zip(&hidden).map(|(a, b)| a * b).sum::<f64>()
        })
        .collect();
    (hidden, logits)
}

/// Mean cross-entropy plus `l2/2 * |weights|^2`, and its gradient.
pub fn loss_and_gradient(
    shape: &MlpShape,
    params: &[f64],
    x: &[Vec<f64>],
    y: &[usize],
    l2: f64,
) -> (f64, Vec<f64>) {
    let (b1, w2, b2) = shape.offsets();
    let n = x.len() as f64;
    let mut grad = vec![0.0; shape.n_params()];
    let mut loss = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let (hidden, logits) = forward(shape, params, row);
        let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|v| (v - m).exp()).collect();
        let z: f64 = exps.iter().sum();
        loss += m + z.ln() - logits[label];
        let delta_out: Vec<f64> = exps
            .iter()
            .enumerate()
            .map(|(k, e)| (e / z - f64::from(u8::from(k == label))) / n)
            .collect();
        let mut delta_hidden = vec![0.0; shape.hidden];
        for (k, d) in delta_out.iter().enumerate() {
            grad[b2 + k] += d;
            for h in 0..shape.hidden {
                grad[w2 + k * shape.hidden + h] += d * hidden[h];
                delta_hidden[h] += d * params[w2 + k * shape.hidden + h];
            }
        }
        for h in 0..shape.hidden {
            let d = delta_hidden[h] * (1.0 - hidden[h] * hidden[h]);
            grad[b1 + h] += d;
            for i in 0..shape.inputs {
                grad[h * shape.inputs + i] += d * row[i];
            }
        }
    }
    loss /= n;
    let weight_ranges = [0..b1, w2..b2];
    for r in weight_ranges {
        for i in r {
            loss += 0.5 * l2 * params[i] * params[i];
            grad[i] += l2 * params[i];
        }
    }
    (loss, grad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub shape: MlpShape,
    pub params: Vec<f64>,
    pub scaler: Standardizer,
}

impl Mlp {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: MlpParams, seed: u64) -> Self {
        let scaler = Standardizer::fit(x);
        let z: Vec<Vec<f64>> = x.iter().map(|r| scaler.apply(r)).collect();
        let shape = MlpShape {
            inputs: x[0].len(),
            hidden: params.hidden,
            outputs: n_classes,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b1, w2, b2) = shape.offsets();
        let limit1 = (6.0 / (shape.inputs + shape.hidden) as f64).sqrt();
        let limit2 = (6.0 / (shape.hidden + shape.outputs) as f64).sqrt();
        let mut w: Vec<f64> = (0..shape.n_params())
            .map(|i| {
                if i < b1 {
                    rng.gen_range(-limit1..limit1)
                } else if (w2..b2).contains(&i) {
                    rng.gen_range(-limit2..limit2)
                } else {
                    0.0
                }
            })
            .collect();
        let mut velocity = vec![0.0; w.len()];
        for _ in 0..params.epochs {
            let (_, g) = loss_and_gradient(&shape, &w, &z, y, params.l2);
            for ((p, v), gi) in w.iter_mut().zip(&mut velocity).zip(&g) {
                *v = params.momentum * *v - params.learning_rate * gi;
                *p += *v;
            }
        }
        Mlp {
            shape,
            params: w,
            scaler,
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let (_, logits) = forward(&self.shape, &self.params, &self.scaler.apply(row));
        argmax_scores(&logits)
    }
}
