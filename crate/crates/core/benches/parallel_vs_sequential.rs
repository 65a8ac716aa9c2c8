// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sequential vs parallel execution of the three data-parallel hot loops:
//! rolling-origin evaluation, feature extraction and CV training.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tsmeta::accuracy::{evaluate_pool, OriginConfig};
use tsmeta::exec::Execution;
use tsmeta::features::feature_matrix;
use tsmeta::forecast::{ForecastConfig, MethodId};
use tsmeta::learners::{train, CvSpec, LearnerKind, MetaDataset, Provenance};
use tsmeta::synthetic::synthetic_collection;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_evaluate(c: &mut Criterion) {
    let data = synthetic_collection(16, 150, 1);
    let origins = OriginConfig {
        horizon: 14,
        n_origins: 2,
        step: None,
    };
    let methods = [MethodId::Snaive, MethodId::EtsAna, MethodId::Theta];
    let cfg = ForecastConfig::default();
    let mut g = c.benchmark_group("evaluate_pool");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| evaluate_pool(black_box(&data), &methods, &origins, &cfg, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_features(c: &mut Criterion) {
    let data = synthetic_collection(64, 400, 2);
    let mut g = c.benchmark_group("feature_matrix");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| feature_matrix(black_box(&data), exec).unwrap())
        });
    }
    g.finish();
}

fn bench_cv(c: &mut Criterion) {
    let n = 120;
    let dataset = MetaDataset {
        ids: (0..n).map(|i| format!("s{i}")).collect(),
        features: (0..n)
            .map(|i| vec![(i % 7) as f64, (i * 13 % 11) as f64, i as f64 / n as f64])
            .collect(),
        labels: (0..n)
            .map(|i| match (i % 7 + i * 13 % 11) % 3 {
                0 => MethodId::Mapa,
                1 => MethodId::Thief,
                _ => MethodId::Theta,
            })
            .collect(),
        feature_names: vec!["a".into(), "b".into(), "c".into()],
        provenance: Provenance::default(),
    };
    let mut g = c.benchmark_group("cv_train_random_forest");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cv = CvSpec {
            folds: 5,
            repeats: 1,
            exec,
            ..CvSpec::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cv, |b, cv| {
            b.iter(|| train(LearnerKind::RandomForest, black_box(&dataset), cv).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_evaluate, bench_features, bench_cv);
criterion_main!(benches);
