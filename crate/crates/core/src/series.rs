// SPDX-License-Identifier: MIT OR Apache-2.0

//! Time-series representation, ingestion, preprocessing and splitting.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SEASONAL_PERIOD: usize = 7;

/// A univariate series. Missing observations are stored as `NaN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub id: String,
    pub values: Vec<f64>,
    pub seasonal_period: usize,
    /// Optional second seasonal period, only used by feature extraction.
    #[serde(default)]
    pub secondary_period: Option<usize>,
    pub start_index: i64,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Self {
        TimeSeries {
            id: id.into(),
            values,
            seasonal_period: DEFAULT_SEASONAL_PERIOD,
            secondary_period: None,
            start_index: 0,
        }
    }

    pub fn with_seasonal_period(mut self, period: usize) -> Self {
        self.seasonal_period = period.max(1);
        self
    }

    pub fn with_secondary_period(mut self, period: Option<usize>) -> Self {
        self.secondary_period = period;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|v| !v.is_finite())
    }

    /// A series with the same metadata and different values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        TimeSeries {
            id: self.id.clone(),
            values,
            seasonal_period: self.seasonal_period,
            secondary_period: self.secondary_period,
            start_index: self.start_index,
        }
    }
}

/// One rolling-origin split of a parent series.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginSplit {
    pub train: TimeSeries,
    pub test: Vec<f64>,
    /// Number of training observations; the test window starts at this index.
    pub origin_index: usize,
}

/// Train/test partition of a collection by series id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionSplit {
    pub train_ids: BTreeSet<String>,
    pub test_ids: BTreeSet<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFormat {
    LongCsv,
    WideCsv,
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long-csv" | "long" => Ok(DataFormat::LongCsv),
            "wide-csv" | "wide" => Ok(DataFormat::WideCsv),
            other => Err(Error::InvalidArgument(format!("unknown data format `{other}`"))),
        }
    }
}

fn parse_value(cell: &str, line: usize) -> Result<f64> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
        return Ok(f64::NAN);
    }
    let v: f64 = cell.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{cell}` as a number"),
    })?;
    Ok(if v.is_finite() { v } else { f64::NAN })
}

pub fn load_collection(path: impl AsRef<Path>, format: DataFormat) -> Result<Vec<TimeSeries>> {
    let file = std::fs::File::open(path.as_ref()).map_err(|e| {
        Error::Io(format!("{}: {e}", path.as_ref().display()))
    })?;
    read_collection(file, format)
}

pub fn read_collection<R: Read>(reader: R, format: DataFormat) -> Result<Vec<TimeSeries>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(format == DataFormat::WideCsv)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let collection = match format {
        DataFormat::LongCsv => read_long(&mut csv)?,
        DataFormat::WideCsv => read_wide(&mut csv)?,
    };
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    Ok(collection)
}

/// Writes `collection` in the long `series_id,t,value` layout.
pub fn write_collection<W: Write>(writer: W, collection: &[TimeSeries]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["series_id", "t", "value"])?;
    for ts in collection {
        for (i, v) in ts.values.iter().enumerate() {
            let value = if v.is_finite() { v.to_string() } else { "NA".into() };
            w.write_record([ts.id.clone(), (ts.start_index + i as i64).to_string(), value])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_long<R: Read>(csv: &mut csv::Reader<R>) -> Result<Vec<TimeSeries>> {
    let header = csv.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names != ["series_id", "t", "value"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `series_id,t,value`, found `{}`", names.join(",")),
        });
    }
    let mut by_id: BTreeMap<String, BTreeMap<i64, f64>> = BTreeMap::new();
    for record in csv.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty series_id".into(),
            });
        }
        let t: i64 = record[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse time index `{}`", &record[1]),
        })?;
        let value = parse_value(&record[2], line)?;
        let slot = by_id.entry(id.clone()).or_default();
        if slot.insert(t, value).is_some() {
            return Err(Error::DuplicateKey { id, t });
        }
    }
    Ok(by_id
        .into_iter()
        .map(|(id, points)| {
            let start = points.keys().next().copied().unwrap_or(0);
            let mut ts = TimeSeries::new(id, points.into_values().collect());
            ts.start_index = start;
            ts
        })
        .collect())
}

fn read_wide<R: Read>(csv: &mut csv::Reader<R>) -> Result<Vec<TimeSeries>> {
    let ids: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();
    let mut seen = BTreeSet::new();
    for id in &ids {
        if id.is_empty() {
            return Err(Error::Parse {
                line: 1,
                message: "empty series id in header".into(),
            });
        }
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateKey {
                id: id.clone(),
                t: 0,
            });
        }
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); ids.len()];
    for record in csv.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() > ids.len() {
            return Err(Error::Parse {
                line,
                message: format!("row has {} fields but header has {}", record.len(), ids.len()),
            });
        }
        for (j, column) in columns.iter_mut().enumerate() {
            let value = match record.get(j) {
                Some(cell) => parse_value(cell, line)?,
                None => f64::NAN,
            };
            column.push(value);
        }
    }
    Ok(ids
        .into_iter()
        .zip(columns)
        .map(|(id, values)| TimeSeries::new(id, values))
        .collect())
}

/// Replaces every missing value by the mean of the observed values.
pub fn impute_missing(ts: &TimeSeries) -> Result<TimeSeries> {
    let observed: Vec<f64> = ts.values.iter().copied().filter(|v| v.is_finite()).collect();
    if observed.is_empty() {
        return Err(Error::AllMissing(ts.id.clone()));
    }
    if observed.len() == ts.values.len() {
        return Ok(ts.clone());
    }
    let fill = crate::stats::mean(&observed);
    Ok(ts.with_values(
        ts.values
            .iter()
            .map(|&v| if v.is_finite() { v } else { fill })
            .collect(),
    ))
}

/// Rolling-origin splits, latest origin first. Origin `k` holds out
/// `[len - h - k*step, len - k*step)`.
pub fn rolling_origins(
    ts: &TimeSeries,
    h: usize,
    n_origins: usize,
    step: usize,
) -> Result<Vec<OriginSplit>> {
    if h == 0 || n_origins == 0 || step == 0 {
        return Err(Error::InvalidArgument(
            "horizon, origin count and step must be positive".into(),
        ));
    }
    let required = h + (n_origins - 1) * step + 2 * ts.seasonal_period;
    if ts.len() < required {
        return Err(Error::InsufficientLength {
            required,
            actual: ts.len(),
        });
    }
    Ok((0..n_origins)
        .map(|k| {
            let origin = ts.len() - h - k * step;
            OriginSplit {
                train: ts.with_values(ts.values[..origin].to_vec()),
                test: ts.values[origin..origin + h].to_vec(),
                origin_index: origin,
            }
        })
        .collect())
}

/// Uniform random, unstratified partition of `ids`.
///
/// The test side has `round(test_ratio * N)` ids, clamped to `1..=N-1`.
pub fn split_collection(ids: &[String], test_ratio: f64, seed: u64) -> Result<CollectionSplit> {
    if !(test_ratio > 0.0 && test_ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test ratio must lie in (0, 1), got {test_ratio}"
        )));
    }
    let unique: BTreeSet<&String> = ids.iter().collect();
    if unique.len() != ids.len() {
        return Err(Error::InvalidArgument("duplicate series ids".into()));
    }
    if ids.len() < 2 {
        return Err(Error::InvalidArgument(
            "at least two series are needed for a split".into(),
        ));
    }
    let n = ids.len();
    let n_test = ((test_ratio * n as f64).round() as usize).clamp(1, n - 1);
    // Sort first so the partition does not depend on the caller's ordering.
    let mut shuffled: Vec<&String> = unique.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let test_ids: BTreeSet<String> = shuffled[..n_test].iter().map(|s| s.to_string()).collect();
    let train_ids: BTreeSet<String> = shuffled[n_test..].iter().map(|s| s.to_string()).collect();
    Ok(CollectionSplit {
        train_ids,
        test_ids,
        seed,
    })
}
