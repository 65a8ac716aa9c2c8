// SPDX-License-Identifier: MIT OR Apache-2.0

//! Principal components of the z-scored feature matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CUMVAR: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// `components[j]` is the unit loading vector of component `j`.
    pub components: Vec<Vec<f64>>,
    /// Explained-variance ratio of every component, descending.
    pub ratios: Vec<f64>,
    /// Components kept by [`pca_transform`].
    pub k: usize,
}

impl PcaModel {
    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn standardize(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(x, (m, s))| (x - m) / s)
            .collect())
    }

    /// Scores on the first `k` components.
    pub fn project(&self, row: &[f64], k: usize) -> Result<Vec<f64>> {
        let z = self.standardize(row)?;
        Ok(self.components[..k.min(self.components.len())]
            .iter()
            .map(|c| c.iter().zip(&z).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Fits components on z-scored columns; `k` is the smallest count whose
/// cumulative ratio reaches `threshold`, and at least 1.
pub fn fit_pca(rows: &[Vec<f64>], threshold: f64) -> Result<PcaModel> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::InsufficientLength { required: 2, actual: n });
    }
    let p = rows[0].len();
    if p == 0 {
        return Err(Error::RankZero);
    }
    if let Some(r) = rows.iter().find(|r| r.len() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            actual: r.len(),
        });
    }
    let mut mean = vec![0.0; p];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v / n as f64;
        }
    }
    let mut scale = vec![0.0; p];
    for r in rows {
        for j in 0..p {
            scale[j] += (r[j] - mean[j]).powi(2) / (n - 1) as f64;
        }
    }
    for (j, s) in scale.iter_mut().enumerate() {
        *s = s.sqrt();
        if !(*s > 1e-12 * mean[j].abs().max(1.0)) {
            log::warn!("pca: column {j} has no variance");
            *s = 1.0;
        }
    }
    let z = DMatrix::from_fn(n, p, |i, j| (rows[i][j] - mean[j]) / scale[j]);
    let cov = (z.transpose() * &z) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();
    if !(total > 1e-12) {
        return Err(Error::RankZero);
    }
    let ratios: Vec<f64> = values.iter().map(|v| v / total).collect();
    let components: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut c: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let lead = c
                .iter()
                .enumerate()
                .fold(0, |best, (j, v)| if v.abs() > c[best].abs() { j } else { best });
            if c[lead] < 0.0 {
                for v in &mut c {
                    *v = -*v;
                }
            }
            c
        })
        .collect();
    let mut k = 1;
    let mut cum = ratios[0];
    while cum < threshold - 1e-12 && k < p {
        cum += ratios[k];
        k += 1;
    }
    Ok(PcaModel {
        mean,
        scale,
        components,
        ratios,
        k,
    })
}

/// Scores of each row on the model's `k` retained components.
pub fn pca_transform(model: &PcaModel, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    rows.iter().map(|r| model.project(r, model.k)).collect()
}
