// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{MetaDataset, TrainedModel};
use crate::error::{Error, Result};
use crate::forecast::MethodId;

/// `counts[i][j]` is the number of rows with true label `labels[i]`
/// predicted as `labels[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<MethodId>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn from_pairs(actual: &[MethodId], predicted: &[MethodId]) -> Self {
        let mut labels: Vec<MethodId> = actual.iter().chain(predicted).copied().collect();
        labels.sort();
        labels.dedup();
        let mut counts = vec![vec![0; labels.len()]; labels.len()];
        for (a, p) in actual.iter().zip(predicted) {
            let i = labels.binary_search(a).unwrap_or_default();
            let j = labels.binary_search(p).unwrap_or_default();
            counts[i][j] += 1;
        }
        ConfusionMatrix { labels, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let diag: usize = (0..self.labels.len()).map(|i| self.counts[i][i]).sum();
        diag as f64 / self.total().max(1) as f64
    }

    /// Share of predictions that fall on any of `methods`.
    pub fn predicted_share(&self, methods: &[MethodId]) -> f64 {
        let mass: usize = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| methods.contains(l))
            .map(|(j, _)| self.counts.iter().map(|row| row[j]).sum::<usize>())
            .sum();
        mass as f64 / self.total().max(1) as f64
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["actual".to_string()];
        header.extend(self.labels.iter().map(|l| l.name().to_string()));
        w.write_record(&header)?;
        for (l, row) in self.labels.iter().zip(&self.counts) {
            let mut rec = vec![l.name().to_string()];
            rec.extend(row.iter().map(|c| c.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn confusion_matrix(model: &TrainedModel, test: &MetaDataset) -> Result<ConfusionMatrix> {
    if test.features.is_empty() {
        return Err(Error::InvalidArgument("empty test set".into()));
    }
    let predicted = model.predict_all(&test.features)?;
    let mut m = ConfusionMatrix::from_pairs(&test.labels, &predicted);
    // include training labels that never occur in the test data
    for c in &model.classes {
        if let Err(pos) = m.labels.binary_search(c) {
            m.labels.insert(pos, *c);
            for row in &mut m.counts {
                row.insert(pos, 0);
            }
            m.counts.insert(pos, vec![0; m.labels.len()]);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions_are_diagonal() {
        let a = [MethodId::Mapa, MethodId::Thief, MethodId::Mapa];
        let m = ConfusionMatrix::from_pairs(&a, &a);
        assert_eq!(m.counts, vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(m.total(), 3);
        assert_eq!(m.accuracy(), 1.0);
    }

    #[test]
    fn row_sums_and_column_share() {
        let a = [MethodId::Mapa, MethodId::Thief, MethodId::Theta, MethodId::Theta, MethodId::Dotm];
        let p = [MethodId::Mapa, MethodId::Mapa, MethodId::Thief, MethodId::Theta, MethodId::Mapa];
        let m = ConfusionMatrix::from_pairs(&a, &p);
        for (l, row) in m.labels.iter().zip(&m.counts) {
            assert_eq!(row.iter().sum::<usize>(), a.iter().filter(|x| *x == l).count());
        }
        assert!((m.predicted_share(&[MethodId::Mapa, MethodId::Thief]) - 0.8).abs() < 1e-12);
    }
}
