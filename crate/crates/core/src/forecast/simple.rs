// SPDX-License-Identifier: MIT OR Apache-2.0

//! Benchmark forecasters: naive, seasonal naive and the full-history mean.

use super::{require_horizon, Forecast, MethodId};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub fn forecast_naive(ts: &TimeSeries, h: usize) -> Result<Forecast> {
    require_horizon(h)?;
    let last = *ts.values.last().ok_or(Error::InsufficientLength {
        required: 1,
        actual: 0,
    })?;
    Ok(Forecast::new(MethodId::Naive, vec![last; h]))
}

/// The last observed full cycle repeated: step `k` uses `Y[t + k - s*K]`
/// with `K = floor((k - 1) / s) + 1`.
pub fn forecast_snaive(ts: &TimeSeries, h: usize) -> Result<Forecast> {
    require_horizon(h)?;
    let s = ts.seasonal_period.max(1);
    let n = ts.len();
    if n < s || n == 0 {
        return Err(Error::InsufficientLength {
            required: s.max(1),
            actual: n,
        });
    }
    let values = (1..=h)
        .map(|k| {
            let cycles = (k - 1) / s + 1;
            // 1-based index t + k - s*K converted to 0-based
            ts.values[n + k - s * cycles - 1]
        })
        .collect();
    Ok(Forecast::new(MethodId::Snaive, values))
}

pub fn forecast_sma(ts: &TimeSeries, h: usize) -> Result<Forecast> {
    require_horizon(h)?;
    if ts.is_empty() {
        return Err(Error::InsufficientLength {
            required: 1,
            actual: 0,
        });
    }
    let avg = crate::stats::mean(&ts.values);
    Ok(Forecast::new(MethodId::Sma, vec![avg; h]))
}
