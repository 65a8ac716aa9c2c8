// SPDX-License-Identifier: MIT OR Apache-2.0

//! Multiple temporal aggregation (MAPA).
//!
//! At every aggregation level `k` the series is turned into non-overlapping
//! `k`-step means (oldest remainder dropped), an automatically selected ETS
//! model is fitted, and its forecast function is split into level, trend and
//! seasonal parts. Parts are moved back to the original frequency and
//! averaged across levels.

use super::ets::{select_ets_slice, EtsConfig, EtsFit};
use super::{require_horizon, FitInfo, Forecast, MethodId};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Fewest aggregate observations a level needs to be fitted.
pub const MIN_AGGREGATE_OBS: usize = 4;

/// Non-overlapping `k`-step means, aligned to the end of the series.
pub fn aggregate_means(x: &[f64], k: usize) -> Vec<f64> {
    let offset = x.len() % k;
    x[offset..]
        .chunks_exact(k)
        .map(|c| c.iter().sum::<f64>() / k as f64)
        .collect()
}

/// Seasonal period seen at aggregation level `k` (1 when none survives).
pub fn level_period(s: usize, k: usize) -> usize {
    if s >= 2 && s % k == 0 && s / k > 1 {
        s / k
    } else {
        1
    }
}

struct LevelParts {
    level: Vec<f64>,
    trend: Vec<f64>,
    seasonal: Option<Vec<f64>>,
}

/// Translates a level-`k` fit to `h` original-frequency steps.
fn translate(fit: &EtsFit, k: usize, h: usize, seasonal_level: bool) -> LevelParts {
    let state = &fit.final_state;
    let kf = k as f64;
    let per_step = state.trend / kf;
    // the aggregate level describes the centre of the last block
    let centre_shift = per_step * (kf - 1.0) / 2.0;
    let level = vec![state.level + centre_shift; h];
    let trend = (1..=h).map(|j| j as f64 * per_step).collect();
    let seasonal = seasonal_level.then(|| {
        (1..=h)
            .map(|j| {
                if state.seasonal.is_empty() {
                    0.0
                } else {
                    let agg_step = (j - 1) / k;
                    state.seasonal[agg_step % state.seasonal.len()]
                }
            })
            .collect()
    });
    LevelParts {
        level,
        trend,
        seasonal,
    }
}

pub fn forecast_mapa(
    ts: &TimeSeries,
    h: usize,
    max_level: usize,
    config: &EtsConfig,
) -> Result<Forecast> {
    require_horizon(h)?;
    if max_level == 0 {
        return Err(Error::InvalidArgument("max_level must be positive".into()));
    }
    let s = ts.seasonal_period;
    if s >= 2 && ts.len() < 2 * s {
        return Err(Error::InsufficientLength {
            required: 2 * s,
            actual: ts.len(),
        });
    }

    let mut parts = Vec::new();
    let mut used = Vec::new();
    let mut last_err = None;
    for k in 1..=max_level {
        let agg = aggregate_means(&ts.values, k);
        if agg.len() < MIN_AGGREGATE_OBS {
            continue;
        }
        let period = level_period(s, k);
        match select_ets_slice(&agg, period, config) {
            Ok(fit) => {
                parts.push(translate(&fit, k, h, period > 1));
                used.push(format!("{k}:{}", fit.kind.name()));
            }
            Err(e) => {
                log::warn!("mapa: level {k} of `{}` skipped: {e}", ts.id);
                last_err = Some(e);
            }
        }
    }
    if parts.is_empty() {
        return Err(last_err.unwrap_or(Error::InsufficientLength {
            required: MIN_AGGREGATE_OBS,
            actual: ts.len(),
        }));
    }

    let n_levels = parts.len() as f64;
    let seasonal_parts: Vec<&Vec<f64>> = parts.iter().filter_map(|p| p.seasonal.as_ref()).collect();
    let values = (0..h)
        .map(|j| {
            let level = parts.iter().map(|p| p.level[j]).sum::<f64>() / n_levels;
            let trend = parts.iter().map(|p| p.trend[j]).sum::<f64>() / n_levels;
            let seasonal = if seasonal_parts.is_empty() {
                0.0
            } else {
                seasonal_parts.iter().map(|s| s[j]).sum::<f64>() / seasonal_parts.len() as f64
            };
            (level + trend) + seasonal
        })
        .collect();
    Ok(Forecast::new(MethodId::Mapa, values).with_info(FitInfo {
        model: "mapa".into(),
        params: vec![("levels".into(), n_levels)],
        aic: None,
        sse: None,
        note: Some(used.join(",")),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::ets::select_ets_auto;

    fn series(values: Vec<f64>, s: usize) -> TimeSeries {
        TimeSeries::new("m", values).with_seasonal_period(s)
    }

    #[test]
    fn aggregation_drops_oldest_remainder() {
        let x: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        assert_eq!(aggregate_means(&x, 3), vec![3.0, 6.0, 9.0]);
        assert_eq!(aggregate_means(&x, 1), x);
    }

    #[test]
    fn level_periods_for_weekly_data() {
        assert_eq!(level_period(7, 1), 7);
        for k in 2..=7 {
            assert_eq!(level_period(7, k), 1);
        }
        assert_eq!(level_period(12, 3), 4);
        assert_eq!(level_period(12, 12), 1);
    }

    #[test]
    fn single_level_is_bit_identical_to_auto_ets() {
        let x: Vec<f64> = (0..63)
            .map(|t| 40.0 + 0.3 * t as f64 + [2.0, -1.0, 0.0, 3.0, -2.0, 1.0, -3.0][t % 7] + ((t * 13) % 5) as f64 * 0.3)
            .collect();
        let ts = series(x, 7);
        let cfg = EtsConfig::default();
        let mapa = forecast_mapa(&ts, 14, 1, &cfg);
        let mapa = mapa.unwrap();
        let auto = select_ets_auto(&ts, 14, &cfg).unwrap();
        let a: Vec<u64> = mapa.values.iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = auto.values.iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_series_gives_constant_forecast() {
        let ts = series(vec![12.0; 70], 7);
        let fc = forecast_mapa(&ts, 10, 7, &EtsConfig::default()).unwrap();
        for v in fc.values {
            assert!((v - 12.0).abs() < 1e-6);
        }
    }

    #[test]
    fn linear_slope_is_recovered() {
        let ts = series((0..90).map(|t| 10.0 + 1.5 * t as f64).collect(), 1);
        let fc = forecast_mapa(&ts, 12, 3, &EtsConfig::default()).unwrap();
        let slope = (fc.values[11] - fc.values[0]) / 11.0;
        assert!((slope - 1.5).abs() / 1.5 < 0.05, "slope {slope}");
    }

    #[test]
    fn all_levels_skipped_is_an_error() {
        let ts = series(vec![1.0, 2.0, 3.0], 1);
        assert!(forecast_mapa(&ts, 2, 3, &EtsConfig::default()).is_err());
    }
}
