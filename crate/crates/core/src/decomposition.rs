// SPDX-License-Identifier: MIT OR Apache-2.0

//! Classical moving-average decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{linear_trend, mean};

/// Additive decomposition `series = trend + seasonal + remainder`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub trend_component: Vec<f64>,
    pub seasonal_component: Vec<f64>,
    pub remainder: Vec<f64>,
    /// One period of seasonal indices; entry `j` applies to positions `t`
    /// with `t % period == j`.
    pub indices: Vec<f64>,
    pub period: usize,
}

/// Width of the trend smoother used when the series has no seasonality.
const NONSEASONAL_WINDOW: usize = 5;

/// Centred moving average of order `period` (a 2×`period` MA for even
/// periods). Positions without a full window are `None`.
pub fn centered_moving_average(x: &[f64], period: usize) -> Vec<Option<f64>> {
    let n = x.len();
    let mut out = vec![None; n];
    if period <= 1 {
        return x.iter().map(|&v| Some(v)).collect();
    }
    let half = period / 2;
    if n < period + (period + 1) % 2 {
        return out;
    }
    if period % 2 == 1 {
        for (t, slot) in out.iter_mut().enumerate().take(n - half).skip(half) {
            *slot = Some(mean(&x[t - half..=t + half]));
        }
    } else {
        for (t, slot) in out.iter_mut().enumerate().take(n - half).skip(half) {
            let inner: f64 = x[t + 1 - half..t + half].iter().sum();
            let total = 0.5 * x[t - half] + inner + 0.5 * x[t + half];
            *slot = Some(total / period as f64);
        }
    }
    out
}

/// Fills undefined edge values by extrapolating a straight line fitted to the
/// nearest `span` defined values on each side.
fn fill_edges(partial: &[Option<f64>], span: usize, fallback: f64) -> Vec<f64> {
    let defined: Vec<usize> = (0..partial.len()).filter(|&i| partial[i].is_some()).collect();
    if defined.is_empty() {
        return vec![fallback; partial.len()];
    }
    let first = defined[0];
    let last = *defined.last().unwrap_or(&first);
    let span = span.max(2);
    let head: Vec<f64> = (first..=last.min(first + span - 1))
        .filter_map(|i| partial[i])
        .collect();
    let tail_start = last.saturating_sub(span - 1).max(first);
    let tail: Vec<f64> = (tail_start..=last).filter_map(|i| partial[i]).collect();
    let (ha, hb) = linear_trend(&head);
    let (ta, tb) = linear_trend(&tail);
    partial
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Some(v) => *v,
            None if i < first => {
                // head fit uses t = 1 at index `first`
                let t = i as f64 - first as f64 + 1.0;
                ha + hb * t
            }
            None => {
                let t = i as f64 - tail_start as f64 + 1.0;
                ta + tb * t
            }
        })
        .collect()
}

fn trend_estimate(x: &[f64], period: usize) -> (Vec<Option<f64>>, Vec<f64>) {
    let window = if period >= 2 {
        period
    } else {
        NONSEASONAL_WINDOW.min(x.len().max(1) | 1)
    };
    let partial = if period >= 2 {
        centered_moving_average(x, window)
    } else {
        let half = window / 2;
        let mut out = vec![None; x.len()];
        if x.len() > 2 * half {
            for (t, slot) in out.iter_mut().enumerate().take(x.len() - half).skip(half) {
                *slot = Some(mean(&x[t - half..=t + half]));
            }
        }
        out
    };
    let filled = fill_edges(&partial, window, mean(x));
    (partial, filled)
}

/// Additive classical decomposition.
pub fn decompose_additive(x: &[f64], period: usize) -> Result<Decomposition> {
    let required = 2 * period.max(1);
    if x.len() < required.max(3) {
        return Err(Error::InsufficientLength {
            required: required.max(3),
            actual: x.len(),
        });
    }
    let (partial, trend) = trend_estimate(x, period);
    let n = x.len();
    if period < 2 {
        let remainder: Vec<f64> = x.iter().zip(&trend).map(|(v, t)| v - t).collect();
        return Ok(Decomposition {
            trend_component: trend,
            seasonal_component: vec![0.0; n],
            remainder,
            indices: vec![0.0],
            period: 1,
        });
    }
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for t in 0..n {
        if let Some(tr) = partial[t] {
            sums[t % period] += x[t] - tr;
            counts[t % period] += 1;
        }
    }
    for j in 0..period {
        if counts[j] == 0 {
            // too short for a full window at this phase: use the filled trend
            let vals: Vec<f64> = (j..n).step_by(period).map(|t| x[t] - trend[t]).collect();
            sums[j] = vals.iter().sum();
            counts[j] = vals.len();
        }
    }
    let mut indices: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let centre = mean(&indices);
    for v in &mut indices {
        *v -= centre;
    }
    let seasonal: Vec<f64> = (0..n).map(|t| indices[t % period]).collect();
    let remainder: Vec<f64> = (0..n).map(|t| x[t] - trend[t] - seasonal[t]).collect();
    Ok(Decomposition {
        trend_component: trend,
        seasonal_component: seasonal,
        remainder,
        indices,
        period,
    })
}

/// Multiplicative classical seasonal indices (mean 1 over one period).
/// Requires strictly positive data.
pub fn multiplicative_indices(x: &[f64], period: usize) -> Result<Vec<f64>> {
    if period < 2 {
        return Ok(vec![1.0]);
    }
    if x.len() < 2 * period {
        return Err(Error::InsufficientLength {
            required: 2 * period,
            actual: x.len(),
        });
    }
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument(
            "multiplicative decomposition needs positive data".into(),
        ));
    }
    let (partial, trend) = trend_estimate(x, period);
    let n = x.len();
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for t in 0..n {
        if let Some(tr) = partial[t] {
            sums[t % period] += x[t] / tr;
            counts[t % period] += 1;
        }
    }
    for j in 0..period {
        if counts[j] == 0 {
            for t in (j..n).step_by(period) {
                sums[j] += x[t] / trend[t];
                counts[j] += 1;
            }
        }
    }
    let mut indices: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let centre = mean(&indices);
    if !(centre.is_finite() && centre > 0.0) {
        return Err(Error::Fit("degenerate multiplicative indices".into()));
    }
    for v in &mut indices {
        *v /= centre;
    }
    Ok(indices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_average_odd_and_even() {
        let x: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        let ma3 = centered_moving_average(&x, 3);
        assert_eq!(ma3[0], None);
        assert_eq!(ma3[1], Some(2.0));
        assert_eq!(ma3[9], None);
        let ma4 = centered_moving_average(&x, 4);
        assert_eq!(ma4[1], None);
        // linear data: 2x4 MA reproduces the line
        assert!((ma4[2].unwrap() - 3.0).abs() < 1e-12);
        assert!((ma4[7].unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(ma4[8], None);
    }

    #[test]
    fn sinusoid_plus_constant_has_no_remainder() {
        let s = 7;
        let x: Vec<f64> = (0..70)
            .map(|t| 10.0 + (2.0 * std::f64::consts::PI * t as f64 / s as f64).sin())
            .collect();
        let d = decompose_additive(&x, s).unwrap();
        for t in s..x.len() - s {
            assert!(d.remainder[t].abs() < 1e-6, "t={t} r={}", d.remainder[t]);
        }
    }

    #[test]
    fn reconstruction_identity() {
        let x: Vec<f64> = (0..40).map(|t| ((t * 37 % 11) as f64).sqrt() + t as f64 * 0.3).collect();
        for period in [1, 2, 4, 7] {
            let d = decompose_additive(&x, period).unwrap();
            for t in 0..x.len() {
                let sum = d.trend_component[t] + d.seasonal_component[t] + d.remainder[t];
                assert!((sum - x[t]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn linear_trend_is_extrapolated_exactly() {
        let x: Vec<f64> = (0..30).map(|t| 2.0 * t as f64 + 1.0).collect();
        let d = decompose_additive(&x, 7).unwrap();
        for t in 0..30 {
            assert!((d.trend_component[t] - x[t]).abs() < 1e-9);
            assert!(d.remainder[t].abs() < 1e-9);
        }
    }

    #[test]
    fn multiplicative_indices_recover_pattern() {
        let pattern = [0.8, 1.2, 1.0, 0.9, 1.1, 1.3, 0.7];
        let x: Vec<f64> = (0..70).map(|t| 50.0 * pattern[t % 7]).collect();
        let idx = multiplicative_indices(&x, 7).unwrap();
        for j in 0..7 {
            assert!((idx[j] - pattern[j]).abs() < 1e-9);
        }
        assert!(multiplicative_indices(&[1.0, -1.0, 2.0, 3.0], 2).is_err());
    }
}
