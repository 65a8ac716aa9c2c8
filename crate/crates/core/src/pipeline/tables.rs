// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV tables derived from an experiment report.

use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::{outperformance_table, ExperimentReport};
use super::inputs::Reduction;
use super::pools::PoolId;
use crate::accuracy::Measure;
use crate::error::Result;
use crate::forecast::MethodId;
use crate::learners::LearnerKind;

pub const NA: &str = "NA";

fn fmt_err(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.6}"),
        _ => NA.into(),
    }
}

/// A table as header plus rows of cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: Vec<String>) -> Self {
        Table {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn has_main_pool(report: &ExperimentReport) -> bool {
    report.pools.iter().any(|p| p.id != PoolId::Basic)
}

fn members(report: &ExperimentReport, pool: PoolId) -> Option<Vec<MethodId>> {
    report.pools.iter().find(|p| p.id == pool).map(|p| p.members.clone())
}

/// Methods by the configured ranking, with both measures.
pub fn rankings_table(report: &ExperimentReport) -> Table {
    let mut t = Table::new("table2_rankings", strings(&["method", "smape", "mase"]));
    let order = report
        .ranking(report.config.ranking_measure)
        .map(|r| r.methods())
        .unwrap_or_default();
    let lookup = |measure: Measure, m: MethodId| {
        report
            .ranking(measure)
            .and_then(|r| r.rows.iter().find(|x| x.method == m))
            .map(|x| x.mean_error)
    };
    for m in order {
        t.rows.push(vec![
            m.name().into(),
            fmt_err(lookup(Measure::Smape, m)),
            fmt_err(lookup(Measure::Mase, m)),
        ]);
    }
    t
}

fn pool_table_name(pool: PoolId) -> &'static str {
    match pool {
        PoolId::Top4 => "table3_top4",
        PoolId::Top6 => "table4_top6",
        PoolId::Top6Snaive => "table5_top6_snaive",
        PoolId::Basic => "table6_basic",
    }
}

/// Boundary, individual and learner rows for one pool. Main pools get one
/// column per (measure, reduction); `basic` gets one per measure.
pub fn pool_table(report: &ExperimentReport, pool: PoolId) -> Option<Table> {
    let roster = members(report, pool)?;
    let columns: Vec<(Measure, Reduction)> = if pool == PoolId::Basic {
        Measure::ALL.iter().map(|m| (*m, Reduction::Raw)).collect()
    } else {
        Measure::ALL
            .iter()
            .flat_map(|m| Reduction::ALL.iter().map(move |r| (*m, *r)))
            .collect()
    };
    let mut header = strings(&["row", "kind"]);
    header.extend(columns.iter().map(|(m, r)| {
        if pool == PoolId::Basic {
            m.name().to_string()
        } else {
            format!("{}_{}", m.name(), r.short())
        }
    }));
    let mut t = Table::new(pool_table_name(pool), header);
    let cell = |m: Measure, r: Reduction, f: &dyn Fn(&super::experiment::VariantReport) -> Option<f64>| {
        fmt_err(report.variant(pool, m, r).and_then(f))
    };

    let mut row = strings(&["boundary", "boundary"]);
    row.extend(columns.iter().map(|(m, r)| cell(*m, *r, &|v| Some(v.boundary))));
    t.rows.push(row);
    for method in &roster {
        let mut row = vec![method.name().to_string(), "individual".into()];
        row.extend(columns.iter().map(|(m, r)| cell(*m, *r, &|v| v.individual(*method))));
        t.rows.push(row);
    }
    for kind in &report.config.learners {
        let mut row = vec![kind.name().to_string(), "learner".into()];
        row.extend(
            columns
                .iter()
                .map(|(m, r)| cell(*m, *r, &|v| v.learner(*kind).and_then(|l| l.error))),
        );
        t.rows.push(row);
    }
    Some(t)
}

/// Test-label percentages per pool and measure, from the raw variants.
/// One row per registry method; `NA` where the method is not in the pool.
pub fn labels_table(report: &ExperimentReport) -> Table {
    let cols: Vec<(PoolId, Measure)> = report
        .pools
        .iter()
        .flat_map(|p| Measure::ALL.iter().map(move |m| (p.id, *m)))
        .collect();
    let mut header = strings(&["method"]);
    header.extend(cols.iter().map(|(p, m)| format!("{}_{}", p.name(), m.name())));
    let mut t = Table::new("table7_labels", header);
    for method in MethodId::ALL {
        let mut row = vec![method.name().to_string()];
        row.extend(cols.iter().map(|(p, m)| {
            report
                .variant(*p, *m, Reduction::Raw)
                .and_then(|v| v.label_distribution.iter().find(|s| s.method == method))
                .map(|s| format!("{:.2}", s.percent))
                .unwrap_or_else(|| NA.into())
        }));
        t.rows.push(row);
    }
    t
}

/// Outperformance percent per learner and (main pool, reduction).
pub fn outperformance_csv(report: &ExperimentReport, measure: Measure) -> Table {
    let name = match measure {
        Measure::Smape => "table8_outperformance_smape",
        Measure::Mase => "table9_outperformance_mase",
    };
    let cols: Vec<(PoolId, Reduction)> = PoolId::MAIN
        .iter()
        .filter(|p| members(report, **p).is_some())
        .flat_map(|p| Reduction::ALL.iter().map(move |r| (*p, *r)))
        .collect();
    let mut header = strings(&["learner"]);
    header.extend(cols.iter().map(|(p, r)| format!("{}_{}", p.name(), r.short())));
    let mut t = Table::new(name, header);
    let table = outperformance_table(report);
    for kind in &report.config.learners {
        let mut row = vec![kind.name().to_string()];
        row.extend(cols.iter().map(|(p, r)| {
            table
                .get(&(*p, measure, *r, *kind))
                .map(|v| v.to_string())
                .unwrap_or_else(|| NA.into())
        }));
        t.rows.push(row);
    }
    t
}

/// Decreasing-pattern counts per measure and reduction.
pub fn patterns_table(report: &ExperimentReport) -> Table {
    let mut header = strings(&["measure"]);
    header.extend(Reduction::ALL.iter().map(|r| r.name().to_string()));
    let mut t = Table::new("table10_patterns", header);
    for m in Measure::ALL {
        let mut row = vec![m.name().to_string()];
        row.extend(Reduction::ALL.iter().map(|r| {
            report
                .patterns
                .iter()
                .find(|p| p.measure == m && p.reduction == *r)
                .map(|p| p.count.to_string())
                .unwrap_or_else(|| NA.into())
        }));
        t.rows.push(row);
    }
    t
}

/// Every table the report supports. A basic-only report yields just the
/// basic-pool table.
pub fn report_tables(report: &ExperimentReport) -> Vec<Table> {
    let mut out = Vec::new();
    let main = has_main_pool(report);
    if main {
        out.push(rankings_table(report));
        for p in PoolId::MAIN {
            out.extend(pool_table(report, p));
        }
    }
    out.extend(pool_table(report, PoolId::Basic));
    if main {
        out.push(labels_table(report));
        out.push(outperformance_csv(report, Measure::Smape));
        out.push(outperformance_csv(report, Measure::Mase));
        if PoolId::MAIN.iter().all(|p| members(report, *p).is_some()) {
            out.push(patterns_table(report));
        }
    }
    out
}

fn confusion_name(pool: PoolId, measure: Measure, reduction: Reduction, kind: LearnerKind) -> String {
    format!("{}_{}_{}_{}.csv", pool.name(), measure.name(), reduction.short(), kind.name())
}

/// Writes `report.json`, the tables and one confusion matrix per trained
/// learner under `dir`. Returns the written paths.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = dir.join("report.json");
    fs::write(&json, report.to_json()?)?;
    written.push(json);
    for t in report_tables(report) {
        let path = dir.join(format!("{}.csv", t.name));
        fs::write(&path, t.to_csv()?)?;
        written.push(path);
    }
    let cdir = dir.join("confusion");
    for v in &report.variants {
        for l in &v.learners {
            if let Some(c) = &l.confusion {
                fs::create_dir_all(&cdir)?;
                let path = cdir.join(confusion_name(v.pool, v.measure, v.reduction, l.learner));
                let mut buf = Vec::new();
                c.write_csv(&mut buf)?;
                fs::write(&path, buf)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
