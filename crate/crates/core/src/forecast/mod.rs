// SPDX-License-Identifier: MIT OR Apache-2.0

//! Point forecasters and their registry.

pub mod ets;
pub mod mapa;
pub mod optim;
pub mod simple;
pub mod theta;
pub mod thief;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub use ets::{
    fit_ets, forecast_ets, select_ets_auto, EtsConfig, EtsFit, EtsKind, EtsParams, EtsState,
};
pub use mapa::forecast_mapa;
pub use simple::{forecast_naive, forecast_sma, forecast_snaive};
pub use theta::{forecast_dotm, forecast_theta, DotmOptions};
pub use thief::{forecast_thief, reconcile_structural};

/// Registered forecasting methods. Declaration order is the registry order
/// used for every tie-break.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    Naive,
    Snaive,
    Sma,
    EtsAnn,
    EtsAna,
    EtsAan,
    EtsAaa,
    EtsAuto,
    Theta,
    Dotm,
    Mapa,
    Thief,
}

impl MethodId {
    pub const ALL: [MethodId; 12] = [
        MethodId::Naive,
        MethodId::Snaive,
        MethodId::Sma,
        MethodId::EtsAnn,
        MethodId::EtsAna,
        MethodId::EtsAan,
        MethodId::EtsAaa,
        MethodId::EtsAuto,
        MethodId::Theta,
        MethodId::Dotm,
        MethodId::Mapa,
        MethodId::Thief,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Naive => "naive",
            MethodId::Snaive => "snaive",
            MethodId::Sma => "sma",
            MethodId::EtsAnn => "ets_ann",
            MethodId::EtsAna => "ets_ana",
            MethodId::EtsAan => "ets_aan",
            MethodId::EtsAaa => "ets_aaa",
            MethodId::EtsAuto => "ets_auto",
            MethodId::Theta => "theta",
            MethodId::Dotm => "dotm",
            MethodId::Mapa => "mapa",
            MethodId::Thief => "thief",
        }
    }

    /// Position in the registry.
    pub fn index(self) -> usize {
        self as usize
    }

    /// The benchmark methods never drawn into the "top" pools.
    pub fn is_benchmark(self) -> bool {
        matches!(self, MethodId::Naive | MethodId::Snaive | MethodId::Sma)
    }

    pub fn forecast(self, ts: &TimeSeries, h: usize, config: &ForecastConfig) -> Result<Forecast> {
        let mut fc = match self {
            MethodId::Naive => forecast_naive(ts, h),
            MethodId::Snaive => forecast_snaive(ts, h),
            MethodId::Sma => forecast_sma(ts, h),
            MethodId::EtsAnn | MethodId::EtsAna | MethodId::EtsAan | MethodId::EtsAaa => {
                let kind = EtsKind::for_method(self).ok_or_else(|| {
                    Error::InvalidArgument(format!("{self} is not an ETS method"))
                })?;
                let fit = fit_ets(ts, kind, &config.ets)?;
                let mut fc = forecast_ets(&fit, h)?;
                fc.method = self;
                Ok(fc)
            }
            MethodId::EtsAuto => select_ets_auto(ts, h, &config.ets),
            MethodId::Theta => forecast_theta(ts, h),
            MethodId::Dotm => forecast_dotm(ts, h, &config.dotm),
            MethodId::Mapa => forecast_mapa(ts, h, config.mapa_max_level, &config.ets),
            MethodId::Thief => forecast_thief(ts, h),
        }?;
        fc.method = self;
        fc.check(h)?;
        Ok(fc)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Diagnostic information attached to a fitted forecast.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitInfo {
    pub model: String,
    pub params: Vec<(String, f64)>,
    pub aic: Option<f64>,
    pub sse: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub method: MethodId,
    pub values: Vec<f64>,
    pub fit_info: Option<FitInfo>,
}

impl Forecast {
    pub fn new(method: MethodId, values: Vec<f64>) -> Self {
        Forecast {
            method,
            values,
            fit_info: None,
        }
    }

    pub fn with_info(mut self, info: FitInfo) -> Self {
        self.fit_info = Some(info);
        self
    }

    fn check(&self, h: usize) -> Result<()> {
        if self.values.len() != h {
            return Err(Error::Fit(format!(
                "{} produced {} values for horizon {h}",
                self.method,
                self.values.len()
            )));
        }
        if let Some(pos) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Fit(format!(
                "{} produced a non-finite forecast at step {}",
                self.method,
                pos + 1
            )));
        }
        Ok(())
    }
}

/// Tunables shared by the fitted forecasters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub ets: EtsConfig,
    pub dotm: DotmOptions,
    pub mapa_max_level: usize,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig {
            ets: EtsConfig::default(),
            dotm: DotmOptions::default(),
            mapa_max_level: 7,
        }
    }
}

pub(crate) fn require_horizon(h: usize) -> Result<()> {
    if h == 0 {
        Err(Error::InvalidArgument("horizon must be positive".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in MethodId::ALL {
            assert_eq!(m.name().parse::<MethodId>().unwrap(), m);
            assert_eq!(MethodId::ALL[m.index()], m);
        }
        assert!("tbats".parse::<MethodId>().is_err());
    }

    #[test]
    fn every_method_returns_h_finite_values() {
        let values: Vec<f64> = (0..84)
            .map(|t| 50.0 + 0.2 * t as f64 + [3.0, -1.0, 0.0, 2.0, -4.0, 1.0, -1.0][t % 7] + ((t * 7919) % 13) as f64 * 0.1)
            .collect();
        let ts = TimeSeries::new("x", values);
        let cfg = ForecastConfig::default();
        for m in MethodId::ALL {
            for h in [1, 7, 10] {
                let fc = m.forecast(&ts, h, &cfg).unwrap();
                assert_eq!(fc.values.len(), h, "{m}");
                assert!(fc.values.iter().all(|v| v.is_finite()), "{m}");
                assert_eq!(fc.method, m);
            }
        }
    }
}
