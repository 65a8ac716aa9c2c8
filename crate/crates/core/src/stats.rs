// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small numeric helpers shared across modules.

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with denominator `n - 1`.
pub fn variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

pub fn std_dev(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

/// Ordinary least squares fit of `x[i] = a + b * t_i` with `t_i = i + 1`.
/// Returns `(intercept, slope)`.
pub fn linear_trend(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.len() < 2 {
        return (x.first().copied().unwrap_or(0.0), 0.0);
    }
    let t_mean = (n + 1.0) / 2.0;
    let x_mean = mean(x);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, v) in x.iter().enumerate() {
        let dt = (i + 1) as f64 - t_mean;
        sxy += dt * (v - x_mean);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    (x_mean - slope * t_mean, slope)
}

/// Sample autocorrelation at `lag`: mean-centred with the biased denominator
/// `sum((x - mean)^2)`.
pub fn acf(x: &[f64], lag: usize) -> Result<f64> {
    if x.len() <= lag {
        return Err(Error::InsufficientLength {
            required: lag + 1,
            actual: x.len(),
        });
    }
    let m = mean(x);
    let denom: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if denom <= (scale * 1e-12).powi(2) * x.len() as f64 {
        return Err(Error::UndefinedAcf);
    }
    if lag == 0 {
        return Ok(1.0);
    }
    let num: f64 = (0..x.len() - lag)
        .map(|t| (x[t] - m) * (x[t + lag] - m))
        .sum();
    Ok(num / denom)
}

/// Autocorrelations at lags `1..=max_lag` (fewer if the series is short).
pub fn acf_vector(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let top = max_lag.min(x.len().saturating_sub(1));
    (1..=top).map(|k| acf(x, k)).collect()
}

pub fn diff(x: &[f64], lag: usize) -> Vec<f64> {
    if x.len() <= lag {
        return Vec::new();
    }
    (lag..x.len()).map(|t| x[t] - x[t - lag]).collect()
}

/// SplitMix64 finaliser; used to derive independent seeds from a base seed.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(base), |acc, &p| mix64(acc ^ mix64(p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_of_exact_line() {
        let x: Vec<f64> = (1..=10).map(|t| 3.0 + 2.0 * t as f64).collect();
        let (a, b) = linear_trend(&x);
        assert!((a - 3.0).abs() < 1e-12);
        assert!((b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn acf_alternating_series() {
        let x: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        // direct summation: mean 0, denominator 20, lag-1 products all -1 (19 of them)
        let expected = -19.0 / 20.0;
        assert!((acf(&x, 1).unwrap() - expected).abs() < 1e-12);
        assert_eq!(acf(&x, 0).unwrap(), 1.0);
    }

    #[test]
    fn acf_of_constant_is_undefined() {
        assert_eq!(acf(&[2.0; 10], 1), Err(Error::UndefinedAcf));
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, &[0]), derive_seed(1, &[1]));
        assert_eq!(derive_seed(7, &[3, 4]), derive_seed(7, &[3, 4]));
    }
}
