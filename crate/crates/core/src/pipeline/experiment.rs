// SPDX-License-Identifier: MIT OR Apache-2.0

//! The three experiment phases: evaluation, feature extraction and the
//! meta-learning comparison over every input variant.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::inputs::{build_inputs, InputVariant, Reduction, ReductionConfig};
use super::pools::{build_pools, PoolId, PoolSpec};
use crate::accuracy::{
    evaluate_pool, rank_methods, EvaluationRecord, Measure, OriginConfig, RankingTable,
    RecordTable,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::features::{feature_matrix, FeatureMatrix};
use crate::forecast::{ForecastConfig, MethodId};
use crate::learners::{
    confusion_matrix, train, ConfusionMatrix, CvSpec, HyperParams, LearnerKind,
};
use crate::series::{split_collection, CollectionSplit, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub origins: OriginConfig,
    pub forecast: ForecastConfig,
    pub test_ratio: f64,
    /// Seed of the train/test split.
    pub seed: u64,
    /// Measure whose ranking fixes the members of the top pools.
    pub ranking_measure: Measure,
    pub pools: Vec<PoolId>,
    pub measures: Vec<Measure>,
    pub reductions: Vec<Reduction>,
    pub learners: Vec<LearnerKind>,
    pub cv: CvSpec,
    pub reduction: ReductionConfig,
    pub exec: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            origins: OriginConfig::default(),
            forecast: ForecastConfig::default(),
            test_ratio: 0.2,
            seed: 42,
            ranking_measure: Measure::Smape,
            pools: PoolId::ALL.to_vec(),
            measures: Measure::ALL.to_vec(),
            reductions: Reduction::ALL.to_vec(),
            learners: LearnerKind::ALL.to_vec(),
            cv: CvSpec::default(),
            reduction: ReductionConfig::default(),
            exec: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.origins.horizon == 0 || self.origins.n_origins == 0 || self.origins.step() == 0 {
            return bad("horizon, origins and step must be positive");
        }
        if !(self.test_ratio > 0.0 && self.test_ratio < 1.0) {
            return bad("test ratio must lie in (0, 1)");
        }
        if self.pools.is_empty() || self.measures.is_empty() || self.learners.is_empty() {
            return bad("pools, measures and learners must be non-empty");
        }
        if self.reductions.is_empty() && self.pools.iter().any(|p| *p != PoolId::Basic) {
            return bad("top pools need at least one reduction");
        }
        if self.cv.folds < 2 || self.cv.repeats == 0 {
            return bad("cross-validation needs at least 2 folds and 1 repeat");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualRow {
    pub method: MethodId,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerResult {
    pub learner: LearnerKind,
    /// Mean test error of the recommended methods; `None` on failure.
    pub error: Option<f64>,
    pub cv_accuracy: Option<f64>,
    pub hyperparams: Option<HyperParams>,
    pub failure: Option<String>,
    /// Integer percent of pool members this learner beats.
    pub outperformance: Option<u32>,
    /// One recommendation per test series, in test-id order.
    pub predictions: Vec<MethodId>,
    pub confusion: Option<ConfusionMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelShare {
    pub method: MethodId,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub pool: PoolId,
    pub members: Vec<MethodId>,
    pub measure: Measure,
    pub reduction: Reduction,
    pub features: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub boundary: f64,
    pub individuals: Vec<IndividualRow>,
    pub learners: Vec<LearnerResult>,
    pub label_distribution: Vec<LabelShare>,
}

impl VariantReport {
    pub fn learner(&self, kind: LearnerKind) -> Option<&LearnerResult> {
        self.learners.iter().find(|l| l.learner == kind)
    }

    pub fn individual(&self, method: MethodId) -> Option<f64> {
        self.individuals.iter().find(|r| r.method == method).map(|r| r.error)
    }

    pub fn best_individual(&self) -> f64 {
        self.individuals.iter().map(|r| r.error).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub measure: Measure,
    pub reduction: Reduction,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rankings: Vec<RankingTable>,
    pub pools: Vec<PoolSpec>,
    pub split: CollectionSplit,
    /// Series left out because some pool member failed on them.
    pub dropped: Vec<String>,
    pub variants: Vec<VariantReport>,
    pub patterns: Vec<PatternRow>,
}

impl ExperimentReport {
    pub fn variant(&self, pool: PoolId, measure: Measure, reduction: Reduction) -> Option<&VariantReport> {
        self.variants
            .iter()
            .find(|v| v.pool == pool && v.measure == measure && v.reduction == reduction)
    }

    pub fn ranking(&self, measure: Measure) -> Option<&RankingTable> {
        self.rankings.iter().find(|r| r.measure == measure)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean over `test_ids` of the smallest pool-member error per series.
pub fn boundary(
    table: &RecordTable,
    pool: &[MethodId],
    test_ids: &[String],
    measure: Measure,
) -> Result<f64> {
    if test_ids.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if pool.is_empty() {
        return Err(Error::InvalidArgument("empty pool".into()));
    }
    let mins = test_ids
        .iter()
        .map(|id| {
            let mut best = f64::INFINITY;
            for m in pool {
                let v = table
                    .value(id, *m, measure)?
                    .ok_or_else(|| Error::Fit(format!("{m} failed on `{id}`")))?;
                best = best.min(v);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean(&mins))
}

/// Mean error of the recommended method per test series.
pub fn evaluate_recommendations(
    table: &RecordTable,
    test_ids: &[String],
    predictions: &[MethodId],
    measure: Measure,
) -> Result<f64> {
    if test_ids.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if test_ids.len() != predictions.len() {
        return Err(Error::DimensionMismatch {
            expected: test_ids.len(),
            actual: predictions.len(),
        });
    }
    let errs = test_ids
        .iter()
        .zip(predictions)
        .map(|(id, m)| {
            table
                .value(id, *m, measure)?
                .ok_or_else(|| Error::Fit(format!("{m} failed on `{id}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean(&errs))
}

/// Integer percent of `individuals` whose error strictly exceeds `error`.
pub fn outperformance(error: f64, individuals: &[IndividualRow]) -> u32 {
    if individuals.is_empty() {
        return 0;
    }
    let beaten = individuals.iter().filter(|r| r.error > error).count();
    (100.0 * beaten as f64 / individuals.len() as f64).round() as u32
}

/// Per-learner outperformance for every variant, keyed by
/// (pool, measure, reduction, learner).
pub fn outperformance_table(
    report: &ExperimentReport,
) -> BTreeMap<(PoolId, Measure, Reduction, LearnerKind), u32> {
    let mut out = BTreeMap::new();
    for v in &report.variants {
        for l in &v.learners {
            if let Some(e) = l.error {
                out.insert((v.pool, v.measure, v.reduction, l.learner), outperformance(e, &v.individuals));
            }
        }
    }
    out
}

/// Percent of `labels` per pool member, in pool order.
pub fn label_distribution(labels: &[MethodId], pool: &[MethodId]) -> Vec<LabelShare> {
    let n = labels.len().max(1) as f64;
    pool.iter()
        .map(|m| LabelShare {
            method: *m,
            percent: 100.0 * labels.iter().filter(|l| *l == m).count() as f64 / n,
        })
        .collect()
}

/// Learners whose error strictly decreases from top4 to top6 to top6_snaive,
/// counted per (measure, reduction). Empty unless all three pools are present.
pub fn detect_decreasing_pattern(variants: &[VariantReport]) -> Vec<PatternRow> {
    let find = |p: PoolId, m: Measure, r: Reduction| {
        variants.iter().find(|v| v.pool == p && v.measure == m && v.reduction == r)
    };
    let mut cells: BTreeSet<(Measure, Reduction)> = BTreeSet::new();
    for v in variants.iter().filter(|v| v.pool == PoolId::Top4) {
        cells.insert((v.measure, v.reduction));
    }
    let mut rows = Vec::new();
    for (measure, reduction) in cells {
        let chain: Vec<&VariantReport> = PoolId::MAIN
            .iter()
            .filter_map(|p| find(*p, measure, reduction))
            .collect();
        if chain.len() != 3 {
            continue;
        }
        let count = chain[0]
            .learners
            .iter()
            .filter(|l| {
                let errs: Vec<Option<f64>> = chain
                    .iter()
                    .map(|v| v.learner(l.learner).and_then(|x| x.error))
                    .collect();
                match (errs[0], errs[1], errs[2]) {
                    (Some(a), Some(b), Some(c)) => a > b && b > c,
                    _ => false,
                }
            })
            .count();
        rows.push(PatternRow {
            measure,
            reduction,
            count,
        });
    }
    rows
}

/// Phase one: records for every registry method.
pub fn run_evaluation(collection: &[TimeSeries], config: &ExperimentConfig) -> Result<Vec<EvaluationRecord>> {
    evaluate_pool(
        collection,
        &MethodId::ALL,
        &config.origins,
        &config.forecast,
        config.exec,
    )
}

/// Phase two.
pub fn run_features(collection: &[TimeSeries], config: &ExperimentConfig) -> Result<FeatureMatrix> {
    feature_matrix(collection, config.exec)
}

fn run_learner(
    kind: LearnerKind,
    variant: &InputVariant,
    table: &RecordTable,
    individuals: &[IndividualRow],
    cv: &CvSpec,
) -> LearnerResult {
    let attempt = || -> Result<LearnerResult> {
        let model = train(kind, &variant.train, cv)?;
        let predictions = model.predict_all(&variant.test.features)?;
        let error = evaluate_recommendations(table, &variant.test.ids, &predictions, variant.measure)?;
        Ok(LearnerResult {
            learner: kind,
            error: Some(error),
            cv_accuracy: Some(model.cv_accuracy),
            hyperparams: Some(model.hyperparams),
            failure: None,
            outperformance: Some(outperformance(error, individuals)),
            predictions,
            confusion: Some(confusion_matrix(&model, &variant.test)?),
        })
    };
    attempt().unwrap_or_else(|e| {
        log::warn!(
            "{kind} failed on {}/{}/{}: {e}",
            variant.pool.id,
            variant.measure,
            variant.reduction
        );
        LearnerResult {
            learner: kind,
            error: None,
            cv_accuracy: None,
            hyperparams: None,
            failure: Some(e.to_string()),
            outperformance: None,
            predictions: Vec::new(),
            confusion: None,
        }
    })
}

/// Phase three from cached phase-one and phase-two outputs.
pub fn run_meta(
    records: &[EvaluationRecord],
    fm: &FeatureMatrix,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    config.validate()?;
    let table = RecordTable::new(records);
    let rankings: Vec<RankingTable> = Measure::ALL.iter().map(|m| rank_methods(records, *m)).collect();
    let ranking = rankings
        .iter()
        .find(|r| r.measure == config.ranking_measure)
        .ok_or(Error::EmptyCollection)?;
    let pools: Vec<PoolSpec> = build_pools(ranking)?
        .into_iter()
        .filter(|p| config.pools.contains(&p.id))
        .collect();

    let mut needed: Vec<MethodId> = pools.iter().flat_map(|p| p.members.clone()).collect();
    needed.sort();
    needed.dedup();
    let (usable, dropped): (Vec<String>, Vec<String>) = fm
        .ids
        .iter()
        .cloned()
        .partition(|id| config.measures.iter().all(|m| table.evaluable(id, &needed, *m)));
    if !dropped.is_empty() {
        log::warn!("{} series dropped: a pool member has no usable record", dropped.len());
    }
    let split = split_collection(&usable, config.test_ratio, config.seed)?;
    let inputs = build_inputs(
        fm,
        &table,
        &pools,
        &config.measures,
        &config.reductions,
        &split,
        &config.reduction,
    )?;

    let mut heads = Vec::with_capacity(inputs.len());
    for v in &inputs {
        let individuals = v
            .pool
            .members
            .iter()
            .map(|m| {
                Ok(IndividualRow {
                    method: *m,
                    error: mean(&table.errors(&v.test.ids, *m, v.measure)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let b = boundary(&table, &v.pool.members, &v.test.ids, v.measure)?;
        heads.push((b, individuals));
    }

    let tasks: Vec<(usize, LearnerKind)> = (0..inputs.len())
        .flat_map(|i| config.learners.iter().map(move |k| (i, *k)))
        .collect();
    let results = config.exec.map(&tasks, |&(i, kind)| {
        run_learner(kind, &inputs[i], &table, &heads[i].1, &config.cv)
    });
    let mut results = results.into_iter();

    let mut variants = Vec::with_capacity(inputs.len());
    for (v, (b, individuals)) in inputs.iter().zip(heads) {
        let learners: Vec<LearnerResult> = results.by_ref().take(config.learners.len()).collect();
        variants.push(VariantReport {
            pool: v.pool.id,
            members: v.pool.members.clone(),
            measure: v.measure,
            reduction: v.reduction,
            features: v.train.feature_names.clone(),
            n_train: v.train.ids.len(),
            n_test: v.test.ids.len(),
            boundary: b,
            individuals,
            learners,
            label_distribution: label_distribution(&v.test.labels, &v.pool.members),
        });
    }
    let patterns = detect_decreasing_pattern(&variants);
    Ok(ExperimentReport {
        config: config.clone(),
        rankings,
        pools,
        split,
        dropped,
        variants,
        patterns,
    })
}

/// All three phases on an imputed collection.
pub fn run_experiment(collection: &[TimeSeries], config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let records = run_evaluation(collection, config)?;
    let fm = run_features(collection, config)?;
    run_meta(&records, &fm, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, m: MethodId, v: f64) -> EvaluationRecord {
        EvaluationRecord {
            series_id: id.into(),
            method: m,
            measure: Measure::Smape,
            value: v,
            failed: false,
        }
    }

    fn table() -> (RecordTable, Vec<String>) {
        let recs = vec![
            rec("a", MethodId::Mapa, 0.1),
            rec("a", MethodId::Thief, 0.3),
            rec("a", MethodId::Snaive, 0.05),
            rec("b", MethodId::Mapa, 0.4),
            rec("b", MethodId::Thief, 0.2),
            rec("b", MethodId::Snaive, 0.5),
        ];
        (RecordTable::new(&recs), vec!["a".into(), "b".into()])
    }

    #[test]
    fn boundary_is_mean_of_minima() {
        let (t, ids) = table();
        let b = boundary(&t, &[MethodId::Mapa, MethodId::Thief], &ids, Measure::Smape).unwrap();
        assert!((b - 0.15).abs() < 1e-15);
        let single = boundary(&t, &[MethodId::Mapa], &ids, Measure::Smape).unwrap();
        assert!((single - 0.25).abs() < 1e-15);
        let wider = boundary(&t, &[MethodId::Mapa, MethodId::Thief, MethodId::Snaive], &ids, Measure::Smape).unwrap();
        assert!(wider <= b);
        assert!(boundary(&t, &[MethodId::Mapa], &[], Measure::Smape).is_err());
    }

    #[test]
    fn oracle_and_constant_predictors() {
        let (t, ids) = table();
        let pool = [MethodId::Mapa, MethodId::Thief];
        let oracle = evaluate_recommendations(&t, &ids, &[MethodId::Mapa, MethodId::Thief], Measure::Smape).unwrap();
        assert_eq!(oracle, boundary(&t, &pool, &ids, Measure::Smape).unwrap());
        let constant = evaluate_recommendations(&t, &ids, &[MethodId::Thief; 2], Measure::Smape).unwrap();
        assert!((constant - 0.25).abs() < 1e-15);
    }

    #[test]
    fn outperformance_percentages() {
        let rows = |errs: &[f64]| -> Vec<IndividualRow> {
            errs.iter().map(|e| IndividualRow { method: MethodId::Mapa, error: *e }).collect()
        };
        assert_eq!(outperformance(0.1, &rows(&[0.2, 0.3, 0.4, 0.5])), 100);
        assert_eq!(outperformance(0.9, &rows(&[0.2, 0.3, 0.4, 0.5])), 0);
        assert_eq!(outperformance(0.25, &rows(&[0.2, 0.2, 0.3, 0.3, 0.3, 0.3, 0.3])), 71);
        // equal errors are not beaten
        assert_eq!(outperformance(0.2, &rows(&[0.2])), 0);
    }

    #[test]
    fn label_shares() {
        let mut labels = vec![MethodId::Mapa; 4];
        labels.extend(vec![MethodId::Thief; 18]);
        let d = label_distribution(&labels, &[MethodId::Mapa, MethodId::Thief, MethodId::Dotm]);
        assert!((d[0].percent - 18.1818).abs() < 1e-3);
        assert_eq!(d[2].percent, 0.0);
        let total: f64 = d.iter().map(|s| s.percent).sum();
        assert!((total - 100.0).abs() < 1e-9);
        let single = label_distribution(&[MethodId::Theta; 3], &[MethodId::Theta]);
        assert_eq!(single[0].percent, 100.0);
    }

    fn variant(pool: PoolId, errs: &[Option<f64>]) -> VariantReport {
        VariantReport {
            pool,
            members: vec![],
            measure: Measure::Mase,
            reduction: Reduction::Raw,
            features: vec![],
            n_train: 0,
            n_test: 0,
            boundary: 0.0,
            individuals: vec![],
            learners: errs
                .iter()
                .zip(LearnerKind::ALL)
                .map(|(e, k)| LearnerResult {
                    learner: k,
                    error: *e,
                    cv_accuracy: None,
                    hyperparams: None,
                    failure: None,
                    outperformance: None,
                    predictions: vec![],
                    confusion: None,
                })
                .collect(),
            label_distribution: vec![],
        }
    }

    #[test]
    fn decreasing_pattern_counts() {
        let flat = vec![
            variant(PoolId::Top4, &[Some(1.0), Some(1.0)]),
            variant(PoolId::Top6, &[Some(1.0), Some(1.0)]),
            variant(PoolId::Top6Snaive, &[Some(1.0), Some(1.0)]),
        ];
        assert_eq!(detect_decreasing_pattern(&flat)[0].count, 0);
        let one = vec![
            variant(PoolId::Top4, &[Some(1.0), Some(1.0)]),
            variant(PoolId::Top6, &[Some(0.9), Some(1.0)]),
            variant(PoolId::Top6Snaive, &[Some(0.8), None]),
        ];
        assert_eq!(detect_decreasing_pattern(&one)[0].count, 1);
        assert!(detect_decreasing_pattern(&one[..2]).is_empty());
    }
}
