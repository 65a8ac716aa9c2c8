// SPDX-License-Identifier: MIT OR Apache-2.0

//! Error measures, rolling-origin pool evaluation and method ranking.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::forecast::{ForecastConfig, MethodId};
use crate::series::{rolling_origins, TimeSeries};

/// Measures recorded by [`evaluate_pool`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Smape,
    Mase,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::Smape, Measure::Mase];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Smape => "smape",
            Measure::Mase => "mase",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smape" => Ok(Measure::Smape),
            "mase" => Ok(Measure::Mase),
            other => Err(Error::InvalidArgument(format!("unknown measure `{other}`"))),
        }
    }
}

fn check_lengths(actual: &[f64], forecast: &[f64]) -> Result<()> {
    if actual.is_empty() {
        return Err(Error::InvalidArgument("empty error window".into()));
    }
    if actual.len() != forecast.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            actual: forecast.len(),
        });
    }
    Ok(())
}

/// Mean absolute percentage error, percent scale.
pub fn mape(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_lengths(actual, forecast)?;
    let mut total = 0.0;
    for (k, (a, f)) in actual.iter().zip(forecast).enumerate() {
        if *a == 0.0 {
            return Err(Error::ZeroActual(k));
        }
        total += 100.0 * (a - f).abs() / a.abs();
    }
    Ok(total / actual.len() as f64)
}

/// Symmetric MAPE, percent scale (0 to 200).
pub fn smape(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_lengths(actual, forecast)?;
    let mut total = 0.0;
    for (k, (a, f)) in actual.iter().zip(forecast).enumerate() {
        let denom = (a + f).abs();
        if denom == 0.0 {
            return Err(Error::DegeneratePair(k));
        }
        total += 200.0 * (a - f).abs() / denom;
    }
    Ok(total / actual.len() as f64)
}

/// In-sample mean absolute seasonal difference at lag `s`.
pub fn seasonal_naive_scale(insample: &[f64], s: usize) -> Result<f64> {
    let s = s.max(1);
    if insample.len() <= s {
        return Err(Error::InsufficientLength {
            required: s + 1,
            actual: insample.len(),
        });
    }
    let total: f64 = insample
        .windows(s + 1)
        .map(|w| (w[s] - w[0]).abs())
        .sum();
    Ok(total / (insample.len() - s) as f64)
}

/// Mean absolute error scaled by the in-sample seasonal naive error.
/// With `s = 1` this is the non-seasonal MASE.
pub fn seasonal_mase(actual: &[f64], forecast: &[f64], insample: &[f64], s: usize) -> Result<f64> {
    check_lengths(actual, forecast)?;
    let scale = seasonal_naive_scale(insample, s)?;
    if scale == 0.0 {
        return Err(Error::ScaleDegenerate);
    }
    Ok(mean_abs_error(actual, forecast) / scale)
}

fn mean_abs_error(actual: &[f64], forecast: &[f64]) -> f64 {
    actual.iter().zip(forecast).map(|(a, f)| (a - f).abs()).sum::<f64>() / actual.len() as f64
}

/// Mean of one (series, method, measure) triple over rolling origins.
/// sMAPE values are stored on the fractional 0 to 2 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub series_id: String,
    pub method: MethodId,
    pub measure: Measure,
    /// `NaN` when `failed`.
    pub value: f64,
    pub failed: bool,
}

impl EvaluationRecord {
    fn key(&self) -> (&str, MethodId, Measure) {
        (&self.series_id, self.method, self.measure)
    }
}

/// Rolling-origin layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginConfig {
    pub horizon: usize,
    pub n_origins: usize,
    /// Distance between origins; the horizon when unset.
    pub step: Option<usize>,
}

impl Default for OriginConfig {
    fn default() -> Self {
        OriginConfig {
            horizon: 56,
            n_origins: 3,
            step: None,
        }
    }
}

impl OriginConfig {
    pub fn step(&self) -> usize {
        self.step.unwrap_or(self.horizon)
    }
}

/// One forecast value produced during evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub series_id: String,
    pub method: MethodId,
    /// 0 is the latest origin.
    pub origin: usize,
    pub step: usize,
    pub value: f64,
}

struct PairOutcome {
    records: Vec<EvaluationRecord>,
    forecasts: Vec<ForecastRow>,
}

fn evaluate_pair(
    ts: &TimeSeries,
    method: MethodId,
    origins: &OriginConfig,
    config: &ForecastConfig,
) -> Result<PairOutcome> {
    let splits = rolling_origins(ts, origins.horizon, origins.n_origins, origins.step())?;
    let s = ts.seasonal_period.max(1);
    let mut forecasts = Vec::new();
    let mut smapes: Result<Vec<f64>> = Ok(Vec::new());
    let mut mases: Result<Vec<f64>> = Ok(Vec::new());
    let mut failure = None;
    for (o, split) in splits.iter().enumerate() {
        let fc = match method.forecast(&split.train, origins.horizon, config) {
            Ok(fc) => fc,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        forecasts.extend(fc.values.iter().enumerate().map(|(k, v)| ForecastRow {
            series_id: ts.id.clone(),
            method,
            origin: o,
            step: k + 1,
            value: *v,
        }));
        if let Ok(v) = smapes.as_mut() {
            match smape(&split.test, &fc.values) {
                Ok(x) => v.push(x / 100.0),
                Err(e) => smapes = Err(e),
            }
        }
        if let Ok(v) = mases.as_mut() {
            let scale = seasonal_naive_scale(&split.train.values, s);
            let mae = mean_abs_error(&split.test, &fc.values);
            match scale {
                // a perfect forecast of a seasonally constant window scores 0
                Ok(sc) if sc == 0.0 && mae == 0.0 => v.push(0.0),
                Ok(sc) if sc == 0.0 => mases = Err(Error::ScaleDegenerate),
                Ok(sc) => v.push(mae / sc),
                Err(e) => mases = Err(e),
            }
        }
    }
    let finish = |measure: Measure, values: Result<Vec<f64>>| {
        let outcome = match (&failure, values) {
            (Some(e), _) => Err(e.clone()),
            (None, Err(e)) => Err(e),
            (None, Ok(v)) => Ok(v.iter().sum::<f64>() / v.len() as f64),
        };
        match outcome {
            Ok(value) => EvaluationRecord {
                series_id: ts.id.clone(),
                method,
                measure,
                value,
                failed: false,
            },
            Err(e) => {
                log::warn!("{method} failed on `{}` ({measure}): {e}", ts.id);
                EvaluationRecord {
                    series_id: ts.id.clone(),
                    method,
                    measure,
                    value: f64::NAN,
                    failed: true,
                }
            }
        }
    };
    Ok(PairOutcome {
        records: vec![finish(Measure::Smape, smapes), finish(Measure::Mase, mases)],
        forecasts,
    })
}

/// Records and every forecast produced, both sorted by key.
pub fn evaluate_pool_with_forecasts(
    collection: &[TimeSeries],
    methods: &[MethodId],
    origins: &OriginConfig,
    config: &ForecastConfig,
    exec: Execution,
) -> Result<(Vec<EvaluationRecord>, Vec<ForecastRow>)> {
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    let pairs: Vec<(usize, MethodId)> = (0..collection.len())
        .flat_map(|i| methods.iter().map(move |m| (i, *m)))
        .collect();
    let outcomes = exec.map(&pairs, |&(i, m)| evaluate_pair(&collection[i], m, origins, config));
    let mut records = Vec::with_capacity(pairs.len() * 2);
    let mut forecasts = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        records.extend(outcome.records);
        forecasts.extend(outcome.forecasts);
    }
    records.sort_by(|a, b| a.key().cmp(&b.key()));
    forecasts.sort_by(|a, b| {
        (&a.series_id, a.method, a.origin, a.step).cmp(&(&b.series_id, b.method, b.origin, b.step))
    });
    Ok((records, forecasts))
}

/// One record per (series, method, measure), averaged over rolling origins.
/// A method that fails on a series yields records flagged `failed`.
pub fn evaluate_pool(
    collection: &[TimeSeries],
    methods: &[MethodId],
    origins: &OriginConfig,
    config: &ForecastConfig,
    exec: Execution,
) -> Result<Vec<EvaluationRecord>> {
    evaluate_pool_with_forecasts(collection, methods, origins, config, exec).map(|(r, _)| r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub method: MethodId,
    /// `NaN` (serialized as `null`) when the method has no usable record.
    #[serde(with = "nan_as_null")]
    pub mean_error: f64,
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub measure: Measure,
    pub rows: Vec<RankingRow>,
}

impl RankingTable {
    pub fn methods(&self) -> Vec<MethodId> {
        self.rows.iter().map(|r| r.method).collect()
    }
}

/// Methods sorted by mean error across series (failed records skipped).
/// Ties follow registry order; methods with no usable record sort last.
pub fn rank_methods(records: &[EvaluationRecord], measure: Measure) -> RankingTable {
    let mut sums: HashMap<MethodId, (f64, usize)> = HashMap::new();
    for r in records.iter().filter(|r| r.measure == measure) {
        let entry = sums.entry(r.method).or_insert((0.0, 0));
        if !r.failed {
            entry.0 += r.value;
            entry.1 += 1;
        }
    }
    let mut rows: Vec<RankingRow> = sums
        .into_iter()
        .map(|(method, (sum, n))| RankingRow {
            method,
            mean_error: if n == 0 { f64::NAN } else { sum / n as f64 },
        })
        .collect();
    rows.sort_by(|a, b| {
        let key = |r: &RankingRow| if r.mean_error.is_nan() { f64::INFINITY } else { r.mean_error };
        key(a)
            .total_cmp(&key(b))
            .then(a.mean_error.is_nan().cmp(&b.mean_error.is_nan()))
            .then(a.method.cmp(&b.method))
    });
    RankingTable { measure, rows }
}

/// Keyed view over a record set.
#[derive(Debug, Clone, Default)]
pub struct RecordTable {
    map: HashMap<(String, MethodId, Measure), (f64, bool)>,
}

impl RecordTable {
    pub fn new(records: &[EvaluationRecord]) -> Self {
        RecordTable {
            map: records
                .iter()
                .map(|r| ((r.series_id.clone(), r.method, r.measure), (r.value, r.failed)))
                .collect(),
        }
    }

    /// Usable value, `None` when the record is failed.
    pub fn value(&self, series_id: &str, method: MethodId, measure: Measure) -> Result<Option<f64>> {
        match self.map.get(&(series_id.to_string(), method, measure)) {
            None => Err(Error::MissingRecord {
                series: series_id.to_string(),
                method,
            }),
            Some((_, true)) => Ok(None),
            Some((v, false)) => Ok(Some(*v)),
        }
    }

    /// True when every pool member has a usable record for `series_id`.
    pub fn evaluable(&self, series_id: &str, pool: &[MethodId], measure: Measure) -> bool {
        pool.iter()
            .all(|m| matches!(self.value(series_id, *m, measure), Ok(Some(_))))
    }

    pub fn best_label(&self, series_id: &str, pool: &[MethodId], measure: Measure) -> Result<MethodId> {
        if pool.is_empty() {
            return Err(Error::InvalidArgument("empty pool".into()));
        }
        let mut sorted = pool.to_vec();
        sorted.sort();
        let mut best: Option<(MethodId, f64)> = None;
        for m in sorted {
            if let Some(v) = self.value(series_id, m, measure)? {
                if best.map_or(true, |(_, b)| v < b) {
                    best = Some((m, v));
                }
            }
        }
        best.map(|(m, _)| m).ok_or_else(|| {
            Error::Fit(format!("every pool method failed on `{series_id}`"))
        })
    }

    /// Error of `method` on each series, in the given order.
    pub fn errors(&self, ids: &[String], method: MethodId, measure: Measure) -> Result<Vec<f64>> {
        ids.iter()
            .map(|id| {
                self.value(id, method, measure)?
                    .ok_or_else(|| Error::Fit(format!("{method} failed on `{id}`")))
            })
            .collect()
    }
}

/// Pool member with the lowest error on `series_id`; ties go to registry order.
pub fn best_label(
    records: &[EvaluationRecord],
    series_id: &str,
    pool: &[MethodId],
    measure: Measure,
) -> Result<MethodId> {
    let subset: Vec<EvaluationRecord> = records
        .iter()
        .filter(|r| r.series_id == series_id && r.measure == measure)
        .cloned()
        .collect();
    RecordTable::new(&subset).best_label(series_id, pool, measure)
}

pub fn write_records_csv<W: Write>(writer: W, records: &[EvaluationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["series_id", "method", "measure", "value", "failed"])?;
    for r in records {
        let value = if r.failed { "NaN".to_string() } else { r.value.to_string() };
        w.write_record([
            r.series_id.as_str(),
            r.method.name(),
            r.measure.name(),
            value.as_str(),
            if r.failed { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<EvaluationRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |message: String| Error::Parse { line, message };
        if row.len() != 5 {
            return Err(bad(format!("expected 5 fields, got {}", row.len())));
        }
        let failed = row[4].parse::<bool>().map_err(|e| bad(e.to_string()))?;
        let value = if failed {
            f64::NAN
        } else {
            row[3].parse::<f64>().map_err(|e| bad(e.to_string()))?
        };
        out.push(EvaluationRecord {
            series_id: row[0].to_string(),
            method: row[1].parse().map_err(|e: Error| bad(e.to_string()))?,
            measure: row[2].parse().map_err(|e: Error| bad(e.to_string()))?,
            value,
            failed,
        });
    }
    Ok(out)
}

pub fn write_ranking_csv<W: Write>(writer: W, table: &RankingTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["rank", "method", "mean_error"])?;
    for (i, row) in table.rows.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            row.method.name().to_string(),
            row.mean_error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_forecasts_csv<W: Write>(writer: W, rows: &[ForecastRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["series_id", "method", "origin", "step", "value"])?;
    for r in rows {
        w.write_record([
            r.series_id.clone(),
            r.method.name().to_string(),
            r.origin.to_string(),
            r.step.to_string(),
            r.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
