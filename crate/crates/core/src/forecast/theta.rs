// SPDX-License-Identifier: MIT OR Apache-2.0

//! Standard two-line theta and the dynamic optimised theta variant (DOTM).

use serde::{Deserialize, Serialize};

use super::optim::{minimize_scalar, nelder_mead, to_bounded, to_unbounded, NelderMeadOptions};
use super::{require_horizon, FitInfo, Forecast, MethodId};
use crate::decomposition::{decompose_additive, multiplicative_indices};
use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stats::{acf_vector, linear_trend};

const ALPHA_LO: f64 = 1e-4;
const ALPHA_HI: f64 = 0.9999;
const ALPHA_GRID: usize = 41;
/// One-sided 95% normal quantile: the 90% two-sided band of the seasonality test.
const SEASONAL_Z: f64 = 1.645;

/// Seasonal adjustment applied before theta decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum SeasonalAdjustment {
    None,
    Multiplicative(Vec<f64>),
    Additive(Vec<f64>),
}

impl SeasonalAdjustment {
    /// Multiplicative classical indices when the lag-`s` autocorrelation is
    /// significant; additive indices instead when the data are not strictly
    /// positive.
    pub fn detect(x: &[f64], period: usize) -> Result<Self> {
        if period < 2 || x.len() < 2 * period {
            return Ok(SeasonalAdjustment::None);
        }
        let r = match acf_vector(x, period) {
            Ok(r) if r.len() == period => r,
            _ => return Ok(SeasonalAdjustment::None),
        };
        let spread: f64 = r[..period - 1].iter().map(|v| v * v).sum();
        let band = SEASONAL_Z * ((1.0 + 2.0 * spread) / x.len() as f64).sqrt();
        if r[period - 1].abs() <= band {
            return Ok(SeasonalAdjustment::None);
        }
        if x.iter().all(|&v| v > 0.0) {
            Ok(SeasonalAdjustment::Multiplicative(multiplicative_indices(x, period)?))
        } else {
            Ok(SeasonalAdjustment::Additive(decompose_additive(x, period)?.indices))
        }
    }

    pub fn deseasonalize(&self, x: &[f64]) -> Vec<f64> {
        match self {
            SeasonalAdjustment::None => x.to_vec(),
            SeasonalAdjustment::Multiplicative(idx) => x
                .iter()
                .enumerate()
                .map(|(t, v)| v / idx[t % idx.len()])
                .collect(),
            SeasonalAdjustment::Additive(idx) => x
                .iter()
                .enumerate()
                .map(|(t, v)| v - idx[t % idx.len()])
                .collect(),
        }
    }

    /// Reapplies the pattern to forecasts that start right after `n` observations.
    pub fn reseasonalize(&self, n: usize, forecast: &mut [f64]) {
        match self {
            SeasonalAdjustment::None => {}
            SeasonalAdjustment::Multiplicative(idx) => {
                for (k, v) in forecast.iter_mut().enumerate() {
                    *v *= idx[(n + k) % idx.len()];
                }
            }
            SeasonalAdjustment::Additive(idx) => {
                for (k, v) in forecast.iter_mut().enumerate() {
                    *v += idx[(n + k) % idx.len()];
                }
            }
        }
    }

    fn label(&self) -> &'static str {
        match self {
            SeasonalAdjustment::None => "none",
            SeasonalAdjustment::Multiplicative(_) => "multiplicative",
            SeasonalAdjustment::Additive(_) => "additive",
        }
    }
}

fn ses_sse(z: &[f64], alpha: f64) -> f64 {
    let mut level = z[0];
    let mut sse = 0.0;
    for &v in z {
        let e = v - level;
        sse += e * e;
        level = alpha * v + (1.0 - alpha) * level;
    }
    sse
}

fn ses_level(z: &[f64], alpha: f64) -> f64 {
    z.iter().fold(z[0], |level, &v| alpha * v + (1.0 - alpha) * level)
}

/// Two-line theta on an already deseasonalised series. Returns the forecasts,
/// the SES coefficient and the in-sample one-step SSE.
pub(crate) fn theta_lines(x: &[f64], h: usize) -> (Vec<f64>, f64, f64) {
    let n = x.len();
    let (a, b) = linear_trend(x);
    let line0: Vec<f64> = (1..=n).map(|t| a + b * t as f64).collect();
    let line2: Vec<f64> = x.iter().zip(&line0).map(|(v, l)| 2.0 * v - l).collect();
    let (alpha, _) = minimize_scalar(|al| ses_sse(&line2, al), ALPHA_LO, ALPHA_HI, ALPHA_GRID);
    let level = ses_level(&line2, alpha);
    let forecast = (1..=h)
        .map(|k| 0.5 * (a + b * (n + k) as f64) + 0.5 * level)
        .collect();
    // in-sample: the combined one-step forecast of x
    let mut z_level = line2[0];
    let mut sse = 0.0;
    for t in 0..n {
        let pred = 0.5 * line0[t] + 0.5 * z_level;
        sse += (x[t] - pred).powi(2);
        z_level = alpha * line2[t] + (1.0 - alpha) * z_level;
    }
    (forecast, alpha, sse)
}

pub fn forecast_theta(ts: &TimeSeries, h: usize) -> Result<Forecast> {
    require_horizon(h)?;
    if ts.len() < 3 {
        return Err(Error::InsufficientLength {
            required: 3,
            actual: ts.len(),
        });
    }
    let adjustment = SeasonalAdjustment::detect(&ts.values, ts.seasonal_period)?;
    let x = adjustment.deseasonalize(&ts.values);
    let (mut values, alpha, sse) = theta_lines(&x, h);
    adjustment.reseasonalize(x.len(), &mut values);
    Ok(Forecast::new(MethodId::Theta, values).with_info(FitInfo {
        model: "theta".into(),
        params: vec![("alpha".into(), alpha), ("theta".into(), 2.0)],
        aic: None,
        sse: Some(sse),
        note: Some(format!("seasonal adjustment: {}", adjustment.label())),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DotmOptions {
    /// Re-estimate the trend line on an expanding window at every step.
    pub dynamic: bool,
    /// Pins theta (diagnostic mode); alpha is still optimised.
    #[serde(default)]
    pub fixed_theta: Option<f64>,
    pub theta_max: f64,
    /// First expanding window size.
    pub min_window: usize,
}

impl Default for DotmOptions {
    fn default() -> Self {
        DotmOptions {
            dynamic: true,
            fixed_theta: None,
            theta_max: 20.0,
            min_window: 3,
        }
    }
}

/// Trend-line coefficients available after each of `0..=n` observations.
fn trend_path(x: &[f64], dynamic: bool, min_window: usize) -> Vec<(f64, f64)> {
    let n = x.len();
    if !dynamic {
        return vec![linear_trend(x); n + 1];
    }
    let w0 = min_window.clamp(2, n);
    let mut out = Vec::with_capacity(n + 1);
    let first = linear_trend(&x[..w0]);
    let (mut st, mut stt, mut sy, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for t in 0..=n {
        if t >= 1 {
            let tt = t as f64;
            let y = x[t - 1];
            st += tt;
            stt += tt * tt;
            sy += y;
            sty += tt * y;
        }
        if t < w0 {
            out.push(first);
        } else {
            let nn = t as f64;
            let slope = (nn * sty - st * sy) / (nn * stt - st * st);
            let intercept = (sy - slope * st) / nn;
            out.push((intercept, slope));
        }
    }
    out
}

/// State-space form of the optimised theta model: returns one-step SSE and
/// final smoothed level.
fn dotm_pass(x: &[f64], coeffs: &[(f64, f64)], theta: f64, alpha: f64) -> (f64, f64) {
    let w = 1.0 - 1.0 / theta;
    let (a0, b0) = coeffs[0];
    let mut level = x[0] + (1.0 - theta) / theta * (a0 + b0);
    let mut sse = 0.0;
    let mut decay = 1.0; // (1 - alpha)^t
    for t in 0..x.len() {
        let (a, b) = coeffs[t];
        let next_decay = decay * (1.0 - alpha);
        let mu = level + w * (decay * a + (1.0 - next_decay) / alpha * b);
        let e = x[t] - mu;
        sse += e * e;
        level = alpha * x[t] + (1.0 - alpha) * level;
        decay = next_decay;
    }
    (sse, level)
}

fn dotm_forecast(x: &[f64], coeffs: &[(f64, f64)], theta: f64, alpha: f64, h: usize) -> Vec<f64> {
    let n = x.len();
    let (_, level) = dotm_pass(x, coeffs, theta, alpha);
    let (a, b) = coeffs[n];
    let w = 1.0 - 1.0 / theta;
    let decay_n = (1.0 - alpha).powi(n as i32);
    let base = (1.0 - decay_n * (1.0 - alpha)) / alpha;
    (1..=h)
        .map(|k| level + w * (decay_n * a + (base + k as f64 - 1.0) * b))
        .collect()
}

pub fn forecast_dotm(ts: &TimeSeries, h: usize, options: &DotmOptions) -> Result<Forecast> {
    require_horizon(h)?;
    if ts.len() < 3 {
        return Err(Error::InsufficientLength {
            required: 3,
            actual: ts.len(),
        });
    }
    let adjustment = SeasonalAdjustment::detect(&ts.values, ts.seasonal_period)?;
    let x = adjustment.deseasonalize(&ts.values);
    let coeffs = trend_path(&x, options.dynamic, options.min_window);

    let fitted = match options.fixed_theta {
        Some(theta) => {
            let (alpha, sse) = minimize_scalar(
                |al| dotm_pass(&x, &coeffs, theta, al).0,
                ALPHA_LO,
                ALPHA_HI,
                ALPHA_GRID,
            );
            Some((theta, alpha, sse))
        }
        None => optimise_dotm(&x, &coeffs, options.theta_max),
    };

    let Some((theta, alpha, sse)) = fitted.filter(|(t, a, s)| t.is_finite() && a.is_finite() && s.is_finite()) else {
        let mut fallback = forecast_theta(ts, h)?;
        fallback.method = MethodId::Dotm;
        if let Some(info) = fallback.fit_info.as_mut() {
            info.note = Some("optimiser failed; standard theta used".into());
        }
        return Ok(fallback);
    };
    let mut values = dotm_forecast(&x, &coeffs, theta, alpha, h);
    adjustment.reseasonalize(x.len(), &mut values);
    Ok(Forecast::new(MethodId::Dotm, values).with_info(FitInfo {
        model: "dotm".into(),
        params: vec![("alpha".into(), alpha), ("theta".into(), theta)],
        aic: None,
        sse: Some(sse),
        note: Some(format!("seasonal adjustment: {}", adjustment.label())),
    }))
}

fn optimise_dotm(x: &[f64], coeffs: &[(f64, f64)], theta_max: f64) -> Option<(f64, f64, f64)> {
    let theta_hi = theta_max.max(1.5);
    let objective = |v: &[f64]| {
        let theta = to_bounded(v[0], 1.0, theta_hi);
        let alpha = to_bounded(v[1], ALPHA_LO, ALPHA_HI);
        dotm_pass(x, coeffs, theta, alpha).0
    };
    // start from the standard-theta coefficient at theta = 2
    let (alpha2, _) = minimize_scalar(
        |al| dotm_pass(x, coeffs, 2.0, al).0,
        ALPHA_LO,
        ALPHA_HI,
        ALPHA_GRID,
    );
    let starts = [(2.0, alpha2), (1.5, 0.5), (4.0, 0.2)];
    let mut best: Option<(f64, f64, f64)> = None;
    for (theta0, alpha0) in starts {
        let x0 = [
            to_unbounded(theta0, 1.0, theta_hi),
            to_unbounded(alpha0.clamp(ALPHA_LO, ALPHA_HI), ALPHA_LO, ALPHA_HI),
        ];
        let m = nelder_mead(objective, &x0, &[0.5, 0.5], NelderMeadOptions::default());
        if m.value.is_finite() && best.map_or(true, |(_, _, v)| m.value < v) {
            best = Some((
                to_bounded(m.x[0], 1.0, theta_hi),
                to_bounded(m.x[1], ALPHA_LO, ALPHA_HI),
                m.value,
            ));
        }
    }
    best
}
