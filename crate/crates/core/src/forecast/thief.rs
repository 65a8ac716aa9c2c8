// SPDX-License-Identifier: MIT OR Apache-2.0

//! Temporal hierarchy forecasting (THieF) with theta base forecasts.
//!
//! Every divisor `k` of the seasonal period defines a level of `k`-step sums.
//! Theta forecasts one full cycle per level and cycle are reconciled with
//! structural scaling, so the bottom level is the weighted least-squares
//! solution with weights `1/k`.

use nalgebra::{DMatrix, DVector};

use super::theta::forecast_theta;
use super::{require_horizon, FitInfo, Forecast, MethodId};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Fewest aggregate observations a level needs to be forecast.
pub const MIN_AGGREGATE_OBS: usize = 3;

pub fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|k| m % k == 0).collect()
}

/// Non-overlapping `k`-step sums, aligned to the end of the series.
pub fn aggregate_sums(x: &[f64], k: usize) -> Vec<f64> {
    let offset = x.len() % k;
    x[offset..].chunks_exact(k).map(|c| c.iter().sum()).collect()
}

/// Reconciles one cycle of base forecasts into `m` bottom-level values.
///
/// `levels` holds `(k, values)` pairs with `values.len() == m / k`; the
/// bottom level (`k = 1`) may be absent only if others fully determine it.
pub fn reconcile_structural(m: usize, levels: &[(usize, Vec<f64>)]) -> Result<Vec<f64>> {
    if m == 0 || levels.is_empty() {
        return Err(Error::InvalidArgument("nothing to reconcile".into()));
    }
    let rows: usize = levels.iter().map(|(k, _)| m / k).sum();
    let mut s = DMatrix::<f64>::zeros(rows, m);
    let mut y = DVector::<f64>::zeros(rows);
    let mut w = DVector::<f64>::zeros(rows);
    let mut r = 0;
    for (k, values) in levels {
        let k = *k;
        if k == 0 || m % k != 0 {
            return Err(Error::InvalidArgument(format!("{k} does not divide {m}")));
        }
        if values.len() != m / k {
            return Err(Error::DimensionMismatch {
                expected: m / k,
                actual: values.len(),
            });
        }
        for (j, v) in values.iter().enumerate() {
            for c in j * k..(j + 1) * k {
                s[(r, c)] = 1.0;
            }
            y[r] = *v;
            w[r] = 1.0 / k as f64;
            r += 1;
        }
    }
    let sw = s.transpose() * DMatrix::from_diagonal(&w);
    let lhs = &sw * &s;
    let rhs = &sw * y;
    let solution = lhs
        .cholesky()
        .ok_or(Error::RankZero)?
        .solve(&rhs);
    Ok(solution.iter().copied().collect())
}

pub fn forecast_thief(ts: &TimeSeries, h: usize) -> Result<Forecast> {
    require_horizon(h)?;
    let m = ts.seasonal_period.max(1);
    let cycles = h.div_ceil(m);

    let mut base: Vec<(usize, Vec<f64>)> = Vec::new();
    for k in divisors(m) {
        let agg = aggregate_sums(&ts.values, k);
        if agg.len() < MIN_AGGREGATE_OBS {
            if k == 1 {
                return Err(Error::InsufficientLength {
                    required: MIN_AGGREGATE_OBS,
                    actual: agg.len(),
                });
            }
            continue;
        }
        let level_ts = TimeSeries::new(ts.id.clone(), agg).with_seasonal_period(m / k);
        let fc = forecast_theta(&level_ts, cycles * (m / k))?;
        base.push((k, fc.values));
    }

    let mut values = Vec::with_capacity(cycles * m);
    for c in 0..cycles {
        let cycle: Vec<(usize, Vec<f64>)> = base
            .iter()
            .map(|(k, v)| {
                let per = m / k;
                (*k, v[c * per..(c + 1) * per].to_vec())
            })
            .collect();
        values.extend(reconcile_structural(m, &cycle)?);
    }
    values.truncate(h);
    let levels: Vec<String> = base.iter().map(|(k, _)| k.to_string()).collect();
    Ok(Forecast::new(MethodId::Thief, values).with_info(FitInfo {
        model: "thief".into(),
        params: vec![("levels".into(), base.len() as f64)],
        aic: None,
        sse: None,
        note: Some(format!("levels {}", levels.join(","))),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_hierarchy() {
        let r = reconcile_structural(2, &[(1, vec![1.0, 1.0]), (2, vec![4.0])]).unwrap();
        assert!((r[0] - 1.5).abs() < 1e-12 && (r[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn coherent_forecasts_are_unchanged() {
        let bottom = vec![1.0, 2.0, 3.0, 4.0];
        let levels = vec![
            (1, bottom.clone()),
            (2, vec![3.0, 7.0]),
            (4, vec![10.0]),
        ];
        let r = reconcile_structural(4, &levels).unwrap();
        for (a, b) in r.iter().zip(&bottom) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    /// Brute-force weighted least squares by coordinate search on a 3-level hierarchy.
    #[test]
    fn matches_weighted_least_squares_oracle() {
        let levels = vec![(1, vec![2.0, 1.0, 5.0, 0.0]), (2, vec![4.0, 3.0]), (4, vec![12.0])];
        let r = reconcile_structural(4, &levels).unwrap();
        let loss = |b: &[f64]| {
            let mut l = 0.0;
            for i in 0..4 {
                l += (b[i] - levels[0].1[i]).powi(2);
            }
            l += (b[0] + b[1] - 4.0).powi(2) / 2.0 + (b[2] + b[3] - 3.0).powi(2) / 2.0;
            l += (b.iter().sum::<f64>() - 12.0).powi(2) / 4.0;
            l
        };
        let base = loss(&r);
        for i in 0..4 {
            for d in [-1e-3, 1e-3] {
                let mut p = r.clone();
                p[i] += d;
                assert!(loss(&p) >= base);
            }
        }
    }

    #[test]
    fn sums_align_to_end() {
        assert_eq!(aggregate_sums(&[1.0, 2.0, 3.0, 4.0, 5.0], 2), vec![5.0, 9.0]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(7), vec![1, 7]);
    }

    #[test]
    fn horizon_truncates_partial_cycle() {
        let x: Vec<f64> = (0..70).map(|t| 20.0 + [1.0, 3.0, 2.0, 0.0, 4.0, 1.0, 2.0][t % 7] + 0.1 * t as f64).collect();
        let ts = TimeSeries::new("t", x).with_seasonal_period(7);
        let fc = forecast_thief(&ts, 10).unwrap();
        assert_eq!(fc.values.len(), 10);
        assert!(fc.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn constant_series_is_flat() {
        let ts = TimeSeries::new("c", vec![5.0; 42]).with_seasonal_period(7);
        for v in forecast_thief(&ts, 7).unwrap().values {
            assert!((v - 5.0).abs() < 1e-8);
        }
    }
}
