// SPDX-License-Identifier: MIT OR Apache-2.0

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tsmeta::series::write_collection;
use tsmeta::synthetic::synthetic_collection;

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tsmeta"));
    c.env_remove("TSMETA_OUT");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn tsmeta")
}

/// Synthetic long-format collection written under `dir`.
pub fn dataset(dir: &Path, n: usize, len: usize, seed: u64) -> PathBuf {
    let path = dir.join("data.csv");
    let mut buf = Vec::new();
    write_collection(&mut buf, &synthetic_collection(n, len, seed)).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

fn cell_matches(pattern: &str, cell: &str) -> bool {
    match pattern {
        "*" => true,
        "#" => cell == "NA" || cell.parse::<f64>().is_ok(),
        lit => lit == cell,
    }
}

/// Checks `csv_text` against a golden schema; returns the first mismatch.
pub fn check_schema(schema: &str, csv_text: &str) -> Result<(), String> {
    let want: Vec<&str> = schema.lines().filter(|l| !l.is_empty()).collect();
    let got: Vec<&str> = csv_text.lines().filter(|l| !l.is_empty()).collect();
    if want.is_empty() || got.is_empty() {
        return Err("empty schema or table".into());
    }
    if want[0] != got[0] {
        return Err(format!("header `{}` != `{}`", got[0], want[0]));
    }
    if want.len() != got.len() {
        return Err(format!("{} rows, schema has {}", got.len() - 1, want.len() - 1));
    }
    for (i, (w, g)) in want.iter().zip(&got).enumerate().skip(1) {
        let wc: Vec<&str> = w.split(',').collect();
        let gc: Vec<&str> = g.split(',').collect();
        if wc.len() != gc.len() || !wc.iter().zip(&gc).all(|(p, c)| cell_matches(p, c)) {
            return Err(format!("row {i}: `{g}` does not match `{w}`"));
        }
    }
    Ok(())
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Every golden schema checked against the tables in `out`.
pub fn check_all_schemas(out: &Path) -> Result<usize, String> {
    let mut n = 0;
    let mut entries: Vec<_> = std::fs::read_dir(golden_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "schema"))
        .collect();
    entries.sort();
    for path in entries {
        let stem = path.file_stem().unwrap().to_string_lossy().to_string();
        let schema = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let table = std::fs::read_to_string(out.join(format!("{stem}.csv")))
            .map_err(|e| format!("{stem}: {e}"))?;
        check_schema(&schema, &table).map_err(|e| format!("{stem}: {e}"))?;
        n += 1;
    }
    Ok(n)
}
