// SPDX-License-Identifier: MIT OR Apache-2.0

use std::sync::OnceLock;

use tsmeta::accuracy::{EvaluationRecord, Measure, OriginConfig, RecordTable};
use tsmeta::features::FeatureMatrix;
use tsmeta::learners::{CvSpec, LearnerKind};
use tsmeta::pipeline::{
    boundary, build_inputs, build_pools, evaluate_recommendations, report_tables, run_evaluation,
    run_features, run_meta, ExperimentConfig, ExperimentReport, PoolId, Reduction,
};
use tsmeta::series::split_collection;
use tsmeta::synthetic::synthetic_collection;

fn config() -> ExperimentConfig {
    ExperimentConfig {
        origins: OriginConfig {
            horizon: 7,
            n_origins: 2,
            step: None,
        },
        learners: vec![LearnerKind::DecisionTree, LearnerKind::Svm],
        cv: CvSpec {
            folds: 3,
            repeats: 1,
            ..CvSpec::default()
        },
        ..ExperimentConfig::default()
    }
}

fn phases() -> &'static (Vec<EvaluationRecord>, FeatureMatrix) {
    static CELL: OnceLock<(Vec<EvaluationRecord>, FeatureMatrix)> = OnceLock::new();
    CELL.get_or_init(|| {
        let data = synthetic_collection(24, 120, 11);
        let cfg = config();
        (run_evaluation(&data, &cfg).unwrap(), run_features(&data, &cfg).unwrap())
    })
}

fn report() -> &'static ExperimentReport {
    static CELL: OnceLock<ExperimentReport> = OnceLock::new();
    CELL.get_or_init(|| {
        let (records, fm) = phases();
        run_meta(records, fm, &config()).unwrap()
    })
}

#[test]
fn nine_variants_per_measure_plus_basic() {
    let r = report();
    for m in Measure::ALL {
        let main = r.variants.iter().filter(|v| v.measure == m && v.pool != PoolId::Basic).count();
        let basic = r.variants.iter().filter(|v| v.measure == m && v.pool == PoolId::Basic).count();
        assert_eq!((main, basic), (9, 1));
    }
}

#[test]
fn boundary_is_a_floor() {
    for v in &report().variants {
        for i in &v.individuals {
            assert!(v.boundary <= i.error + 1e-12);
        }
        for l in &v.learners {
            assert!(v.boundary <= l.error.unwrap() + 1e-12, "{:?}", l.learner);
        }
    }
}

#[test]
fn individual_errors_repeat_across_reductions() {
    let r = report();
    for p in PoolId::MAIN {
        for m in Measure::ALL {
            let raw = r.variant(p, m, Reduction::Raw).unwrap();
            for red in [Reduction::FeatureSelection, Reduction::Pca] {
                let other = r.variant(p, m, red).unwrap();
                assert_eq!(raw.individuals, other.individuals);
                assert_eq!(raw.boundary, other.boundary);
            }
        }
    }
}

#[test]
fn oracle_and_constant_recommenders() {
    let (records, fm) = phases();
    let table = RecordTable::new(records);
    let r = report();
    let test_ids: Vec<String> = r.split.test_ids.iter().cloned().collect();
    for v in &r.variants {
        let oracle: Vec<_> = test_ids
            .iter()
            .map(|id| table.best_label(id, &v.members, v.measure).unwrap())
            .collect();
        let e = evaluate_recommendations(&table, &test_ids, &oracle, v.measure).unwrap();
        assert_eq!(e, v.boundary);
        let m = v.members[0];
        let constant = evaluate_recommendations(&table, &test_ids, &vec![m; test_ids.len()], v.measure).unwrap();
        assert_eq!(Some(constant), v.individual(m));
    }
    assert_eq!(fm.ids.len(), 24);
}

#[test]
fn reductions_fit_on_training_rows_only() {
    let (records, fm) = phases();
    let table = RecordTable::new(records);
    let cfg = config();
    let ranking = &report().rankings[0];
    let pools = build_pools(ranking).unwrap();
    let split = split_collection(&fm.ids, 0.2, 42).unwrap();
    let variants = build_inputs(fm, &table, &pools[..1], &[Measure::Smape], &Reduction::ALL, &split, &cfg.reduction).unwrap();
    let raw = &variants[0];
    assert_eq!(raw.train.feature_names.len(), fm.active_columns().len());
    let pca = variants[2].pca.as_ref().unwrap();
    assert_eq!(variants[2].train.feature_names.len(), pca.k);
    let train_mean: Vec<f64> = (0..raw.train.n_features())
        .map(|j| raw.train.features.iter().map(|r| r[j]).sum::<f64>() / raw.train.features.len() as f64)
        .collect();
    for (a, b) in pca.mean.iter().zip(&train_mean) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
    let fs = &variants[1];
    assert_eq!(fs.train.feature_names.len(), 12.min(fm.active_columns().len()));
    assert!(fs.weights.is_some());
}

#[test]
fn boundary_shrinks_as_pools_grow() {
    let r = report();
    for m in Measure::ALL {
        let b: Vec<f64> = PoolId::MAIN
            .iter()
            .map(|p| r.variant(*p, m, Reduction::Raw).unwrap().boundary)
            .collect();
        assert!(b[1] <= b[0] && b[2] <= b[1], "{b:?}");
    }
    let (records, _) = phases();
    let table = RecordTable::new(records);
    let ids: Vec<String> = r.split.test_ids.iter().cloned().collect();
    let top4 = &r.pools[0].members;
    assert!(boundary(&table, top4, &ids, Measure::Smape).unwrap() <= boundary(&table, &top4[..1], &ids, Measure::Smape).unwrap());
}

#[test]
fn reruns_are_byte_identical() {
    let (records, fm) = phases();
    let again = run_meta(records, fm, &config()).unwrap();
    assert_eq!(again.to_json().unwrap(), report().to_json().unwrap());
    let sequential = ExperimentConfig {
        exec: tsmeta::exec::Execution::Sequential,
        cv: CvSpec {
            exec: tsmeta::exec::Execution::Sequential,
            ..config().cv
        },
        ..config()
    };
    let seq = run_meta(records, fm, &sequential).unwrap();
    assert_eq!(seq.variants, report().variants);
}

#[test]
fn seed_changes_only_learner_cells() {
    let (records, fm) = phases();
    let other = run_meta(records, fm, &ExperimentConfig { cv: CvSpec { seed: 7, ..config().cv }, ..config() }).unwrap();
    for (a, b) in other.variants.iter().zip(&report().variants) {
        assert_eq!(a.individuals, b.individuals);
        assert_eq!(a.boundary, b.boundary);
    }
}

#[test]
fn label_distributions_sum_to_100() {
    for v in &report().variants {
        let total: f64 = v.label_distribution.iter().map(|s| s.percent).sum();
        assert!((total - 100.0).abs() < 0.1);
    }
}

#[test]
fn basic_only_run_emits_one_table() {
    let (records, fm) = phases();
    let cfg = ExperimentConfig {
        pools: vec![PoolId::Basic],
        ..config()
    };
    let r = run_meta(records, fm, &cfg).unwrap();
    let names: Vec<String> = report_tables(&r).into_iter().map(|t| t.name).collect();
    assert_eq!(names, vec!["table6_basic".to_string()]);
    let full: Vec<String> = report_tables(report()).into_iter().map(|t| t.name).collect();
    assert_eq!(full.len(), 9);
}
