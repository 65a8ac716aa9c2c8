// SPDX-License-Identifier: MIT OR Apache-2.0

//! The 24 per-series meta-features.

use std::io::Write;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::decomposition::{decompose_additive, Decomposition};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::TimeSeries;
use crate::stats::{acf, acf_vector, diff, mean};

pub const N_FEATURES: usize = 24;

/// Column order of every feature matrix.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "frequency",
    "nperiods",
    "seasonal_period1",
    "seasonal_period2",
    "trend",
    "spike",
    "linearity",
    "curvature",
    "e_acf1",
    "e_acf10",
    "seasonal_strength1",
    "seasonal_strength2",
    "peak1",
    "peak2",
    "trough1",
    "trough2",
    "entropy",
    "x_acf1",
    "x_acf10",
    "diff1_acf1",
    "diff1_acf10",
    "diff2_acf1",
    "diff2_acf10",
    "seas_acf1",
];

/// Fraction of the series tapered at each end before the periodogram.
const TAPER: f64 = 0.1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub frequency: f64,
    pub nperiods: f64,
    pub seasonal_period1: f64,
    pub seasonal_period2: f64,
    pub trend: f64,
    pub spike: f64,
    pub linearity: f64,
    pub curvature: f64,
    pub e_acf1: f64,
    pub e_acf10: f64,
    pub seasonal_strength1: f64,
    pub seasonal_strength2: f64,
    pub peak1: f64,
    pub peak2: f64,
    pub trough1: f64,
    pub trough2: f64,
    pub entropy: f64,
    pub x_acf1: f64,
    pub x_acf10: f64,
    pub diff1_acf1: f64,
    pub diff1_acf10: f64,
    pub diff2_acf1: f64,
    pub diff2_acf10: f64,
    pub seas_acf1: f64,
}

impl FeatureVector {
    /// Values in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.frequency,
            self.nperiods,
            self.seasonal_period1,
            self.seasonal_period2,
            self.trend,
            self.spike,
            self.linearity,
            self.curvature,
            self.e_acf1,
            self.e_acf10,
            self.seasonal_strength1,
            self.seasonal_strength2,
            self.peak1,
            self.peak2,
            self.trough1,
            self.trough2,
            self.entropy,
            self.x_acf1,
            self.x_acf10,
            self.diff1_acf1,
            self.diff1_acf10,
            self.diff2_acf1,
            self.diff2_acf10,
            self.seas_acf1,
        ]
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        feature_index(name).map(|i| self.to_array()[i])
    }
}

pub fn feature_index(name: &str) -> Result<usize> {
    FEATURE_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| Error::UnknownFeature(name.to_string()))
}

/// Additive decomposition at the series' seasonal period.
pub fn decompose(ts: &TimeSeries) -> Result<Decomposition> {
    decompose_additive(&ts.values, ts.seasonal_period)
}

fn sample_variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// `max(0, 1 - Var(r) / Var(c + r))`; 0 when `c + r` carries no variance
/// relative to the series.
pub fn strength(component: &[f64], remainder: &[f64], series_var: f64) -> f64 {
    let combined: Vec<f64> = component.iter().zip(remainder).map(|(c, r)| c + r).collect();
    let denom = sample_variance(&combined);
    if !(denom > 1e-12 * series_var) {
        return 0.0;
    }
    (1.0 - sample_variance(remainder) / denom).clamp(0.0, 1.0)
}

/// Variance of the leave-one-out variances.
pub fn spike(remainder: &[f64]) -> f64 {
    let n = remainder.len();
    if n < 4 {
        return 0.0;
    }
    let m = mean(remainder);
    let ss: f64 = remainder.iter().map(|r| (r - m) * (r - m)).sum();
    let nf = n as f64;
    let loo: Vec<f64> = remainder
        .iter()
        .map(|r| (ss - nf / (nf - 1.0) * (r - m) * (r - m)) / (nf - 2.0))
        .collect();
    sample_variance(&loo)
}

/// Coefficients of the trend on orthonormal linear and quadratic polynomials in time.
pub fn linearity_curvature(trend: &[f64]) -> (f64, f64) {
    let n = trend.len();
    if n < 3 {
        return (0.0, 0.0);
    }
    let t_mean = (n as f64 + 1.0) / 2.0;
    let mut p1: Vec<f64> = (1..=n).map(|t| t as f64 - t_mean).collect();
    normalise(&mut p1);
    let sq: Vec<f64> = p1.iter().map(|v| v * v).collect();
    let sq_mean = mean(&sq);
    let along: f64 = sq.iter().zip(&p1).map(|(a, b)| a * b).sum();
    let mut p2: Vec<f64> = sq.iter().zip(&p1).map(|(s, p)| s - sq_mean - along * p).collect();
    normalise(&mut p2);
    let dot = |p: &[f64]| p.iter().zip(trend).map(|(a, b)| a * b).sum::<f64>();
    (dot(&p1), dot(&p2))
}

fn normalise(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v {
            *x /= norm;
        }
    }
}

/// Normalised spectral entropy of the mean-removed, cosine-tapered series.
pub fn spectral_entropy(x: &[f64]) -> f64 {
    let n = x.len();
    let n_freq = n / 2;
    if n_freq < 2 {
        return 0.0;
    }
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(v - m, 0.0)).collect();
    let taper = (TAPER * n as f64).floor() as usize;
    for i in 0..taper {
        let w = 0.5 * (1.0 - (std::f64::consts::PI * (2 * i + 1) as f64 / (2 * taper) as f64).cos());
        buf[i] *= w;
        buf[n - 1 - i] *= w;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf[1..=n_freq].iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return 0.0;
    }
    let h: f64 = power
        .iter()
        .map(|p| p / total)
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    (h / (n_freq as f64).ln()).clamp(0.0, 1.0)
}

/// Lag-1 ACF and the sum of squares of the first ten, or zeros when undefined.
fn acf_pair(x: &[f64]) -> (f64, f64) {
    match acf_vector(x, 10) {
        Ok(r) if !r.is_empty() => (r[0], r.iter().map(|v| v * v).sum()),
        _ => (0.0, 0.0),
    }
}

/// 1-based positions of the largest and smallest seasonal index.
fn peak_trough(indices: &[f64]) -> (f64, f64) {
    if indices.len() < 2 {
        return (0.0, 0.0);
    }
    let mut peak = 0;
    let mut trough = 0;
    for (j, v) in indices.iter().enumerate() {
        if *v > indices[peak] {
            peak = j;
        }
        if *v < indices[trough] {
            trough = j;
        }
    }
    ((peak + 1) as f64, (trough + 1) as f64)
}

pub fn extract_features(ts: &TimeSeries) -> Result<FeatureVector> {
    let x = &ts.values;
    if ts.has_missing() {
        return Err(Error::InvalidArgument(format!(
            "series `{}` has missing values; impute first",
            ts.id
        )));
    }
    let s = ts.seasonal_period.max(1);
    let dec = decompose_additive(x, s)?;
    let series_var = sample_variance(x);

    let mut f = FeatureVector {
        frequency: s as f64,
        nperiods: 1.0,
        seasonal_period1: s as f64,
        ..FeatureVector::default()
    };
    let (lin, curv) = linearity_curvature(&dec.trend_component);
    f.linearity = lin;
    f.curvature = curv;
    f.spike = spike(&dec.remainder);

    let constant = acf(x, 0).is_err();
    if constant {
        log::warn!("series `{}` is constant; ACF, entropy and strength features set to 0", ts.id);
        return Ok(f);
    }

    f.trend = strength(&dec.trend_component, &dec.remainder, series_var);
    if s >= 2 {
        f.seasonal_strength1 = strength(&dec.seasonal_component, &dec.remainder, series_var);
        (f.peak1, f.trough1) = peak_trough(&dec.indices);
    }
    (f.e_acf1, f.e_acf10) = acf_pair(&dec.remainder);
    f.entropy = spectral_entropy(x);
    (f.x_acf1, f.x_acf10) = acf_pair(x);
    (f.diff1_acf1, f.diff1_acf10) = acf_pair(&diff(x, 1));
    (f.diff2_acf1, f.diff2_acf10) = acf_pair(&diff(&diff(x, 1), 1));
    f.seas_acf1 = acf(x, s).unwrap_or(0.0);

    if let Some(s2) = ts.secondary_period.filter(|&p| p >= 2) {
        let adjusted: Vec<f64> = x.iter().zip(&dec.seasonal_component).map(|(v, c)| v - c).collect();
        match decompose_additive(&adjusted, s2) {
            Ok(d2) => {
                f.nperiods = 2.0;
                f.seasonal_period2 = s2 as f64;
                f.seasonal_strength2 = strength(&d2.seasonal_component, &d2.remainder, series_var);
                (f.peak2, f.trough2) = peak_trough(&d2.indices);
            }
            Err(e) => log::warn!("series `{}`: second period {s2} ignored: {e}", ts.id),
        }
    }
    Ok(f)
}

/// Stacked feature vectors with a zero-variance column report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub ids: Vec<String>,
    pub rows: Vec<[f64; N_FEATURES]>,
    pub constant: [bool; N_FEATURES],
}

impl FeatureMatrix {
    pub fn from_rows(ids: Vec<String>, rows: Vec<[f64; N_FEATURES]>) -> Self {
        let mut constant = [true; N_FEATURES];
        if let Some(first) = rows.first() {
            for (j, flag) in constant.iter_mut().enumerate() {
                let tol = 1e-12 * first[j].abs().max(1.0);
                *flag = rows.iter().all(|r| (r[j] - first[j]).abs() <= tol);
            }
        }
        FeatureMatrix { ids, rows, constant }
    }

    pub fn constant_columns(&self) -> Vec<&'static str> {
        FEATURE_NAMES
            .iter()
            .zip(&self.constant)
            .filter(|(_, c)| **c)
            .map(|(n, _)| *n)
            .collect()
    }

    pub fn active_columns(&self) -> Vec<&'static str> {
        FEATURE_NAMES
            .iter()
            .zip(&self.constant)
            .filter(|(_, c)| !**c)
            .map(|(n, _)| *n)
            .collect()
    }

    /// Row-major values of the named columns for the given ids.
    pub fn select(&self, ids: &[String], columns: &[&str]) -> Result<Vec<Vec<f64>>> {
        let cols: Vec<usize> = columns.iter().map(|c| feature_index(c)).collect::<Result<_>>()?;
        ids.iter()
            .map(|id| {
                let i = self
                    .ids
                    .iter()
                    .position(|x| x == id)
                    .ok_or_else(|| Error::InvalidArgument(format!("no features for `{id}`")))?;
                Ok(cols.iter().map(|&j| self.rows[i][j]).collect())
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["series_id"];
        header.extend(FEATURE_NAMES);
        w.write_record(&header)?;
        for (id, row) in self.ids.iter().zip(&self.rows) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn constant_report_json(&self) -> String {
        serde_json::to_string_pretty(&self.constant_columns()).unwrap_or_else(|_| "[]".into())
    }
}

pub fn feature_matrix(collection: &[TimeSeries], exec: Execution) -> Result<FeatureMatrix> {
    let rows = exec
        .map(collection, |ts| extract_features(ts).map(|f| f.to_array()))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let ids = collection.iter().map(|ts| ts.id.clone()).collect();
    Ok(FeatureMatrix::from_rows(ids, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_series_is_all_trend() {
        let ts = TimeSeries::new("lin", (1..=140).map(|t| t as f64).collect());
        let f = extract_features(&ts).unwrap();
        assert!(f.trend >= 0.99, "{}", f.trend);
        assert!(f.seasonal_strength1 <= 0.1, "{}", f.seasonal_strength1);
        assert!(f.linearity > 0.0);
        assert!(f.curvature.abs() < 1e-6 * f.linearity);
    }

    #[test]
    fn periodic_series_peak_and_strength() {
        let pattern = [0.0, 1.0, 5.0, 2.0, -1.0, -3.0, 0.5];
        let ts = TimeSeries::new("p", (0..98).map(|t| 10.0 + pattern[t % 7]).collect());
        let f = extract_features(&ts).unwrap();
        assert!(f.seasonal_strength1 >= 0.99);
        assert_eq!(f.peak1, 3.0);
        assert_eq!(f.trough1, 6.0);
    }

    #[test]
    fn spike_matches_brute_force() {
        let r = [0.3, -1.2, 0.8, 2.5, -0.4, 0.0, 1.1];
        let loo: Vec<f64> = (0..r.len())
            .map(|i| {
                let rest: Vec<f64> = r.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                sample_variance(&rest)
            })
            .collect();
        assert!((spike(&r) - sample_variance(&loo)).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_polynomial_coefficients() {
        // a pure quadratic in the second basis vector has zero linearity
        let n = 30;
        let (l, c) = linearity_curvature(&vec![4.0; n]);
        assert!(l.abs() < 1e-10 && c.abs() < 1e-10);
        let line: Vec<f64> = (1..=n).map(|t| 2.0 * t as f64).collect();
        let (l, c) = linearity_curvature(&line);
        // |2 (t - mean)| norm
        let norm: f64 = (1..=n).map(|t| (t as f64 - 15.5).powi(2)).sum::<f64>().sqrt();
        assert!((l - 2.0 * norm).abs() < 1e-9);
        assert!(c.abs() < 1e-9);
    }

    #[test]
    fn constant_series_falls_back_to_zero() {
        let f = extract_features(&TimeSeries::new("c", vec![3.0; 28])).unwrap();
        assert_eq!(f.x_acf1, 0.0);
        assert_eq!(f.entropy, 0.0);
        assert_eq!(f.trend, 0.0);
        assert_eq!(f.frequency, 7.0);
    }

    #[test]
    fn second_period_only_from_metadata() {
        let x: Vec<f64> = (0..140).map(|t| (t % 7) as f64 + 3.0 * ((t % 14) / 7) as f64).collect();
        let plain = extract_features(&TimeSeries::new("a", x.clone())).unwrap();
        assert_eq!(plain.seasonal_period2, 0.0);
        assert_eq!(plain.seasonal_strength2, 0.0);
        let two = extract_features(&TimeSeries::new("a", x).with_secondary_period(Some(14))).unwrap();
        assert_eq!(two.nperiods, 2.0);
        assert_eq!(two.seasonal_period2, 14.0);
        assert!(two.seasonal_strength2 > 0.5);
    }

    #[test]
    fn constant_columns() {
        let a = TimeSeries::new("a", (0..56).map(|t| (t * 7 % 11) as f64).collect());
        let m = feature_matrix(std::slice::from_ref(&a), Execution::Sequential).unwrap();
        assert_eq!(m.constant_columns().len(), N_FEATURES);
        let b = a.clone();
        let m = feature_matrix(&[a.clone(), b], Execution::Sequential).unwrap();
        assert_eq!(m.constant_columns().len(), N_FEATURES);
        let c = TimeSeries::new("c", (0..56).map(|t| (t * 5 % 13) as f64 + 0.1 * t as f64).collect());
        let m = feature_matrix(&[a, c], Execution::Sequential).unwrap();
        assert!(m.constant_columns().contains(&"frequency"));
        assert!(!m.constant_columns().contains(&"trend"));
    }

    #[test]
    fn names_resolve() {
        for (i, n) in FEATURE_NAMES.iter().enumerate() {
            assert_eq!(feature_index(n).unwrap(), i);
        }
        assert!(feature_index("hurst").is_err());
    }
}
