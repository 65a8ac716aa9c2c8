// SPDX-License-Identifier: MIT OR Apache-2.0

//! Hyperparameter selection by repeated k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FittedModel, HyperParams, LearnerKind, MetaDataset, TrainedModel};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::stats::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvSpec {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    #[serde(default)]
    pub exec: Execution,
}

impl Default for CvSpec {
    fn default() -> Self {
        CvSpec {
            folds: 10,
            repeats: 5,
            seed: 42,
            exec: Execution::default(),
        }
    }
}

/// Fold index of every row for each repeat.
pub fn fold_assignments(n: usize, folds: usize, repeats: usize, seed: u64) -> Vec<Vec<usize>> {
    (0..repeats)
        .map(|r| {
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[r as u64]));
            order.shuffle(&mut rng);
            let mut fold = vec![0; n];
            for (pos, &i) in order.iter().enumerate() {
                fold[i] = pos % folds;
            }
            fold
        })
        .collect()
}

pub fn train(kind: LearnerKind, dataset: &MetaDataset, cv: &CvSpec) -> Result<TrainedModel> {
    train_with_grid(kind, dataset, cv, &kind.default_grid(dataset.n_features()))
}

/// Picks the grid point with the highest mean fold accuracy (ties go to the
/// earlier point) and refits it on all rows.
pub fn train_with_grid(
    kind: LearnerKind,
    dataset: &MetaDataset,
    cv: &CvSpec,
    grid: &[HyperParams],
) -> Result<TrainedModel> {
    dataset.validate()?;
    let classes = dataset.classes();
    let y: Vec<usize> = dataset
        .labels
        .iter()
        .map(|l| classes.binary_search(l).unwrap_or_default())
        .collect();
    let x = &dataset.features;
    let n = y.len();
    let p = dataset.n_features();
    let base = derive_seed(cv.seed, &[kind as u64]);

    if classes.len() < 2 {
        log::warn!(
            "{kind}: training labels are all `{}`; using a constant predictor",
            classes[0]
        );
        return Ok(TrainedModel {
            learner: kind,
            classes,
            n_features: p,
            hyperparams: HyperParams::Constant,
            cv_accuracy: 1.0,
            model: FittedModel::Constant(0),
        });
    }
    if cv.folds < 2 || cv.folds > n {
        return Err(Error::InvalidArgument(format!(
            "{} folds requested for {n} rows",
            cv.folds
        )));
    }
    if grid.is_empty() || cv.repeats == 0 {
        return Err(Error::InvalidArgument("empty hyperparameter grid or no repeats".into()));
    }

    let assignments = fold_assignments(n, cv.folds, cv.repeats, cv.seed);
    let tasks: Vec<(usize, usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..cv.repeats).flat_map(move |r| (0..cv.folds).map(move |f| (g, r, f))))
        .collect();
    let k = classes.len();
    let scores = cv.exec.map(&tasks, |&(g, r, f)| {
        let fold = &assignments[r];
        let (train_idx, test_idx): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold[i] != f);
        let xs: Vec<Vec<f64>> = train_idx.iter().map(|&i| x[i].clone()).collect();
        let ys: Vec<usize> = train_idx.iter().map(|&i| y[i]).collect();
        let seed = derive_seed(base, &[g as u64, r as u64, f as u64]);
        let model = FittedModel::fit(&grid[g], &xs, &ys, k, seed);
        let correct = test_idx.iter().filter(|&&i| model.predict(&x[i]) == y[i]).count();
        correct as f64 / test_idx.len() as f64
    });
    let per_point = cv.repeats * cv.folds;
    let means: Vec<f64> = scores
        .chunks(per_point)
        .map(|c| c.iter().sum::<f64>() / per_point as f64)
        .collect();
    let mut best = 0;
    for (g, m) in means.iter().enumerate() {
        if *m > means[best] {
            best = g;
        }
    }
    let model = FittedModel::fit(&grid[best], x, &y, k, derive_seed(base, &[best as u64, u64::MAX]));
    Ok(TrainedModel {
        learner: kind,
        classes,
        n_features: p,
        hyperparams: grid[best],
        cv_accuracy: means[best],
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::MethodId;
    use crate::learners::Provenance;

    fn dataset(features: Vec<Vec<f64>>, labels: Vec<MethodId>) -> MetaDataset {
        let p = features[0].len();
        MetaDataset {
            ids: (0..labels.len()).map(|i| format!("s{i}")).collect(),
            features,
            labels,
            feature_names: (0..p).map(|j| format!("f{j}")).collect(),
            provenance: Provenance::default(),
        }
    }

    #[test]
    fn folds_are_balanced_and_seeded() {
        let a = fold_assignments(23, 5, 2, 7);
        for fold in &a {
            let mut sizes = [0; 5];
            for f in fold {
                sizes[*f] += 1;
            }
            assert!(sizes.iter().all(|&s| s == 4 || s == 5));
        }
        assert_eq!(a, fold_assignments(23, 5, 2, 7));
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn single_label_gives_constant_model() {
        let d = dataset(vec![vec![1.0], vec![2.0], vec![3.0]], vec![MethodId::Mapa; 3]);
        let m = train(LearnerKind::Svm, &d, &CvSpec::default()).unwrap();
        assert_eq!(m.cv_accuracy, 1.0);
        assert_eq!(m.predict(&[100.0]).unwrap(), MethodId::Mapa);
    }

    #[test]
    fn too_many_folds_is_an_error() {
        let d = dataset(
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec![MethodId::Mapa, MethodId::Thief, MethodId::Mapa],
        );
        assert!(train(LearnerKind::DecisionTree, &d, &CvSpec::default()).is_err());
    }

    #[test]
    fn dimension_checked_on_predict() {
        let d = dataset(
            (0..20).map(|i| vec![i as f64, 0.0]).collect(),
            (0..20).map(|i| if i < 10 { MethodId::Theta } else { MethodId::Dotm }).collect(),
        );
        let cv = CvSpec { folds: 5, repeats: 1, ..CvSpec::default() };
        let m = train(LearnerKind::DecisionTree, &d, &cv).unwrap();
        assert!(m.predict(&[1.0]).is_err());
        assert_eq!(m.predict(&[2.0, 0.0]).unwrap(), MethodId::Theta);
    }
}
