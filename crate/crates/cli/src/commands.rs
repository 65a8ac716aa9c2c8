// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tsmeta::accuracy::{read_records_csv, write_ranking_csv, write_records_csv, EvaluationRecord, Measure};
use tsmeta::features::{extract_features, FeatureMatrix, FEATURE_NAMES, N_FEATURES};
use tsmeta::pipeline::{report_tables, run_evaluation, run_meta, write_report, ExperimentReport};
use tsmeta::series::{impute_missing, load_collection, TimeSeries};

use crate::config::RunConfig;
use crate::error::CliError;

/// Series loaded, imputed and tagged with the configured periods.
pub fn load_data(cfg: &RunConfig) -> Result<(Vec<TimeSeries>, Vec<u8>), CliError> {
    let path = cfg.data_path()?;
    let bytes = fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let raw = load_collection(path, cfg.format)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if raw.is_empty() {
        return Err(CliError::data(format!("{}: no series", path.display())));
    }
    let series = raw
        .iter()
        .map(|ts| {
            impute_missing(ts).map(|s| {
                s.with_seasonal_period(cfg.season)
                    .with_secondary_period(cfg.secondary_season)
            })
        })
        .collect::<tsmeta::Result<Vec<_>>>()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok((series, bytes))
}

fn digest(data: &[u8], parts: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(data);
    for p in parts {
        h.update([0u8]);
        h.update(p.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_dir(out: &Path) -> PathBuf {
    out.join(".cache")
}

fn evaluation_key(data: &[u8], cfg: &RunConfig) -> String {
    let e = cfg.experiment();
    digest(
        data,
        &[
            "records-v1".into(),
            format!("{:?}", cfg.format),
            serde_json::to_string(&e.origins).unwrap_or_default(),
            serde_json::to_string(&e.forecast).unwrap_or_default(),
            format!("{}/{:?}", cfg.season, cfg.secondary_season),
        ],
    )
}

fn features_key(data: &[u8], cfg: &RunConfig) -> String {
    digest(
        data,
        &[
            "features-v1".into(),
            format!("{:?}", cfg.format),
            format!("{}/{:?}", cfg.season, cfg.secondary_season),
        ],
    )
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::internal(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::internal(format!("{}: {e}", path.display())))
}

/// Records for every registry method, from the cache when possible.
pub fn evaluation_records(
    series: &[TimeSeries],
    data: &[u8],
    cfg: &RunConfig,
) -> Result<Vec<EvaluationRecord>, CliError> {
    let out = cfg.out_dir();
    let cached = cache_dir(&out).join(format!("records-{}.csv", evaluation_key(data, cfg)));
    if let Ok(bytes) = fs::read(&cached) {
        match read_records_csv(bytes.as_slice()) {
            Ok(records) => {
                log::info!("evaluation cache hit: {}", cached.display());
                return Ok(records);
            }
            Err(e) => log::warn!("ignoring unreadable cache {}: {e}", cached.display()),
        }
    }
    let records = run_evaluation(series, &cfg.experiment())?;
    let mut buf = Vec::new();
    write_records_csv(&mut buf, &records)?;
    write_file(&cached, &buf)?;
    Ok(records)
}

/// Rows that failed extraction are reported and left out of the matrix.
pub struct FeatureOutcome {
    pub matrix: FeatureMatrix,
    pub failures: Vec<(String, String)>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct FeatureCache {
    matrix: FeatureMatrix,
    failures: Vec<(String, String)>,
}

pub fn feature_outcome(series: &[TimeSeries], data: &[u8], cfg: &RunConfig) -> Result<FeatureOutcome, CliError> {
    let out = cfg.out_dir();
    let cached = cache_dir(&out).join(format!("features-{}.json", features_key(data, cfg)));
    if let Ok(text) = fs::read_to_string(&cached) {
        if let Ok(c) = serde_json::from_str::<FeatureCache>(&text) {
            log::info!("feature cache hit: {}", cached.display());
            return Ok(FeatureOutcome {
                matrix: c.matrix,
                failures: c.failures,
            });
        }
    }
    let rows = cfg.exec().map(series, extract_features);
    let mut ids = Vec::new();
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (ts, row) in series.iter().zip(rows) {
        match row {
            Ok(f) if f.to_array().iter().all(|v| v.is_finite()) => {
                ids.push(ts.id.clone());
                ok.push(f.to_array());
            }
            Ok(_) => failures.push((ts.id.clone(), "non-finite feature".to_string())),
            Err(e) => failures.push((ts.id.clone(), e.to_string())),
        }
    }
    for (id, why) in &failures {
        log::warn!("feature extraction failed for `{id}`: {why}");
    }
    if ok.is_empty() {
        return Err(CliError::data("feature extraction failed for every series"));
    }
    let c = FeatureCache {
        matrix: FeatureMatrix::from_rows(ids, ok),
        failures,
    };
    let text = serde_json::to_string(&c).map_err(|e| CliError::internal(e.to_string()))?;
    write_file(&cached, text.as_bytes())?;
    Ok(FeatureOutcome {
        matrix: c.matrix,
        failures: c.failures,
    })
}

fn records_outputs(records: &[EvaluationRecord], out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let mut buf = Vec::new();
    write_records_csv(&mut buf, records)?;
    let p = out.join("records.csv");
    write_file(&p, &buf)?;
    written.push(p);
    for m in Measure::ALL {
        let mut buf = Vec::new();
        write_ranking_csv(&mut buf, &tsmeta::accuracy::rank_methods(records, m))?;
        let p = out.join(format!("ranking_{}.csv", m.name()));
        write_file(&p, &buf)?;
        written.push(p);
    }
    Ok(written)
}

/// Feature CSV in collection order; rows that failed extraction hold `NA`.
fn features_outputs(series: &[TimeSeries], fo: &FeatureOutcome, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut w = csv_writer();
    let mut header = vec!["series_id".to_string()];
    header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(internal)?;
    for ts in series {
        let mut rec = vec![ts.id.clone()];
        match fo.matrix.ids.iter().position(|x| *x == ts.id) {
            Some(i) => {
                rec.extend(fo.matrix.rows[i].iter().map(|v| v.to_string()));
            }
            None => rec.extend(std::iter::repeat("NA".to_string()).take(N_FEATURES)),
        }
        w.write_record(&rec).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(internal)?;
    let p = out.join("features.csv");
    write_file(&p, &bytes)?;
    let report = serde_json::json!({
        "constant_columns": fo.matrix.constant_columns(),
        "active_columns": fo.matrix.active_columns(),
        "failed_series": fo.failures.iter().map(|(id, why)| serde_json::json!({"series_id": id, "reason": why})).collect::<Vec<_>>(),
    });
    let q = out.join("constant_columns.json");
    write_file(&q, serde_json::to_string_pretty(&report).map_err(internal)?.as_bytes())?;
    Ok(vec![p, q])
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::internal(e.to_string())
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (series, data) = load_data(cfg)?;
    let records = evaluation_records(&series, &data, cfg)?;
    records_outputs(&records, &cfg.out_dir())
}

pub fn cmd_features(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (series, data) = load_data(cfg)?;
    let fo = feature_outcome(&series, &data, cfg)?;
    features_outputs(&series, &fo, &cfg.out_dir())
}

pub fn cmd_run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (series, data) = load_data(cfg)?;
    let out = cfg.out_dir();
    let records = evaluation_records(&series, &data, cfg)?;
    let fo = feature_outcome(&series, &data, cfg)?;
    let mut written = records_outputs(&records, &out)?;
    written.extend(features_outputs(&series, &fo, &out)?);
    let report = run_meta(&records, &fo.matrix, &cfg.experiment())?;
    written.extend(write_report(&report, &out)?);
    Ok(written)
}

/// Rewrites the tables of an existing `report.json` and returns a summary.
pub fn cmd_report(cfg: &RunConfig) -> Result<(Vec<PathBuf>, String), CliError> {
    let out = cfg.out_dir();
    let path = out.join("report.json");
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let report: ExperimentReport =
        serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let mut written = Vec::new();
    let mut summary = String::new();
    for t in report_tables(&report) {
        let p = out.join(format!("{}.csv", t.name));
        write_file(&p, t.to_csv()?.as_bytes())?;
        summary.push_str(&format!("{} ({} rows)\n", t.name, t.rows.len()));
        written.push(p);
    }
    Ok((written, summary))
}
