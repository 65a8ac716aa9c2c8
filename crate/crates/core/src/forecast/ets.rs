// SPDX-License-Identifier: MIT OR Apache-2.0

//! Additive exponential smoothing (ANN, AAN, ANA, AAA) in state-space form.
//!
//! One-step forecast and updates, with absent components dropped:
//!
//! ```text
//! yhat_t = l_{t-1} + b_{t-1} + s_{t-m}
//! l_t    = alpha (y_t - s_{t-m}) + (1 - alpha)(l_{t-1} + b_{t-1})
//! b_t    = beta (l_t - l_{t-1}) + (1 - beta) b_{t-1}
//! s_t    = gamma (y_t - l_t) + (1 - gamma) s_{t-m}
//! ```
//!
//! Smoothing coefficients and the initial states are fitted jointly by
//! minimising the in-sample sum of squared one-step errors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::optim::{nelder_mead, to_bounded, to_unbounded, NelderMeadOptions};
use super::{require_horizon, FitInfo, Forecast, MethodId};
use crate::decomposition::decompose_additive;
use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stats::{linear_trend, mean, std_dev};

pub const PARAM_LOWER: f64 = 1e-4;
pub const PARAM_UPPER: f64 = 0.9999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtsKind {
    pub trend: bool,
    pub seasonal: bool,
}

impl EtsKind {
    pub const ANN: EtsKind = EtsKind { trend: false, seasonal: false };
    pub const AAN: EtsKind = EtsKind { trend: true, seasonal: false };
    pub const ANA: EtsKind = EtsKind { trend: false, seasonal: true };
    pub const AAA: EtsKind = EtsKind { trend: true, seasonal: true };

    /// Candidate order for automatic selection; also the AIC tie-break order.
    pub const AUTO_ORDER: [EtsKind; 4] = [EtsKind::ANN, EtsKind::AAN, EtsKind::ANA, EtsKind::AAA];

    pub fn name(self) -> &'static str {
        match (self.trend, self.seasonal) {
            (false, false) => "ANN",
            (true, false) => "AAN",
            (false, true) => "ANA",
            (true, true) => "AAA",
        }
    }

    pub fn for_method(method: MethodId) -> Option<EtsKind> {
        match method {
            MethodId::EtsAnn => Some(EtsKind::ANN),
            MethodId::EtsAan => Some(EtsKind::AAN),
            MethodId::EtsAna => Some(EtsKind::ANA),
            MethodId::EtsAaa => Some(EtsKind::AAA),
            _ => None,
        }
    }

    pub fn method(self) -> MethodId {
        match (self.trend, self.seasonal) {
            (false, false) => MethodId::EtsAnn,
            (true, false) => MethodId::EtsAan,
            (false, true) => MethodId::EtsAna,
            (true, true) => MethodId::EtsAaa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtsParams {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

/// Filter state. `seasonal` holds the last `m` seasonal states, oldest first,
/// so `seasonal[0]` is the one applied to the next observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtsState {
    pub level: f64,
    pub trend: f64,
    pub seasonal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtsConfig {
    /// Random restarts on top of the heuristic start.
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
    /// Pins alpha (diagnostic mode); other coefficients are still fitted.
    #[serde(default)]
    pub fixed_alpha: Option<f64>,
}

impl Default for EtsConfig {
    fn default() -> Self {
        EtsConfig {
            restarts: 5,
            seed: 0x00E7_5EED,
            max_evals: 3000,
            fixed_alpha: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtsFit {
    pub kind: EtsKind,
    pub period: usize,
    pub params: EtsParams,
    pub initial: EtsState,
    pub final_state: EtsState,
    pub fitted: Vec<f64>,
    pub sse: f64,
    pub n_obs: usize,
    /// Free parameters, including initial states.
    pub n_params: usize,
    pub aic: f64,
}

impl EtsFit {
    pub fn fit_info(&self) -> FitInfo {
        let mut params = vec![("alpha".to_string(), self.params.alpha)];
        if let Some(b) = self.params.beta {
            params.push(("beta".into(), b));
        }
        if let Some(g) = self.params.gamma {
            params.push(("gamma".into(), g));
        }
        FitInfo {
            model: self.kind.name().to_string(),
            params,
            aic: Some(self.aic),
            sse: Some(self.sse),
            note: None,
        }
    }

    /// Forecast function split into level, trend and seasonal parts.
    pub fn components(&self, h: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let s = &self.final_state;
        let level = vec![s.level; h];
        let trend = (1..=h).map(|k| k as f64 * s.trend).collect();
        let seasonal = (1..=h)
            .map(|k| {
                if s.seasonal.is_empty() {
                    0.0
                } else {
                    s.seasonal[(k - 1) % s.seasonal.len()]
                }
            })
            .collect();
        (level, trend, seasonal)
    }
}

/// Runs the recursions over `y`, returning one-step fitted values, the final
/// state and the sum of squared errors.
pub fn ets_filter(
    kind: EtsKind,
    params: &EtsParams,
    initial: &EtsState,
    y: &[f64],
) -> (Vec<f64>, EtsState, f64) {
    let mut fitted = Vec::with_capacity(y.len());
    let mut state = initial.clone();
    let sse = run_filter(kind, params, initial, y, Some(&mut fitted), Some(&mut state));
    (fitted, state, sse)
}

fn run_filter(
    kind: EtsKind,
    params: &EtsParams,
    initial: &EtsState,
    y: &[f64],
    mut fitted: Option<&mut Vec<f64>>,
    final_state: Option<&mut EtsState>,
) -> f64 {
    let alpha = params.alpha;
    let beta = params.beta.unwrap_or(0.0);
    let gamma = params.gamma.unwrap_or(0.0);
    let mut level = initial.level;
    let mut trend = if kind.trend { initial.trend } else { 0.0 };
    let mut seasonal = initial.seasonal.clone();
    let m = seasonal.len();
    let mut head = 0usize;
    let mut sse = 0.0;
    for &obs in y {
        let s_old = if kind.seasonal { seasonal[head] } else { 0.0 };
        let yhat = level + trend + s_old;
        if let Some(f) = fitted.as_deref_mut() {
            f.push(yhat);
        }
        let e = obs - yhat;
        sse += e * e;
        let new_level = alpha * (obs - s_old) + (1.0 - alpha) * (level + trend);
        if kind.trend {
            trend = beta * (new_level - level) + (1.0 - beta) * trend;
        }
        if kind.seasonal {
            seasonal[head] = gamma * (obs - new_level) + (1.0 - gamma) * s_old;
            head = (head + 1) % m;
        }
        level = new_level;
    }
    if let Some(out) = final_state {
        let mut ordered = Vec::with_capacity(m);
        for i in 0..m {
            ordered.push(seasonal[(head + i) % m]);
        }
        *out = EtsState {
            level,
            trend: if kind.trend { trend } else { 0.0 },
            seasonal: if kind.seasonal { ordered } else { Vec::new() },
        };
    }
    sse
}

fn minimum_length(kind: EtsKind, period: usize) -> usize {
    if kind.seasonal {
        (2 * period).max(4)
    } else {
        3
    }
}

/// Heuristic initial states: level from the first season (or the first few
/// points), trend from the first-cycle difference, seasonal states from the
/// classical decomposition.
fn initial_state(kind: EtsKind, y: &[f64], period: usize) -> Result<EtsState> {
    if kind.seasonal {
        let m = period;
        let indices = decompose_additive(y, m)?.indices;
        let first = mean(&y[..m]);
        let trend = if kind.trend {
            (mean(&y[m..2 * m]) - first) / m as f64
        } else {
            0.0
        };
        // first-season mean sits at time (m+1)/2; move it back to time 0
        let level = first - trend * (m as f64 + 1.0) / 2.0;
        Ok(EtsState {
            level,
            trend,
            seasonal: indices,
        })
    } else {
        let w = y.len().min(10);
        if kind.trend {
            let (a, b) = linear_trend(&y[..w]);
            Ok(EtsState {
                level: a,
                trend: b,
                seasonal: Vec::new(),
            })
        } else {
            Ok(EtsState {
                level: mean(&y[..w.min(5).max(1)]),
                trend: 0.0,
                seasonal: Vec::new(),
            })
        }
    }
}

/// Packing of the free parameters into an unbounded optimisation vector.
struct Layout {
    kind: EtsKind,
    m: usize,
    fixed_alpha: Option<f64>,
}

impl Layout {
    fn n_smoothing(&self) -> usize {
        usize::from(self.fixed_alpha.is_none())
            + usize::from(self.kind.trend)
            + usize::from(self.kind.seasonal)
    }

    fn n_states(&self) -> usize {
        1 + usize::from(self.kind.trend) + if self.kind.seasonal { self.m - 1 } else { 0 }
    }

    fn pack(&self, params: &EtsParams, state: &EtsState) -> Vec<f64> {
        let mut v = Vec::new();
        if self.fixed_alpha.is_none() {
            v.push(to_unbounded(params.alpha, PARAM_LOWER, PARAM_UPPER));
        }
        if self.kind.trend {
            v.push(to_unbounded(params.beta.unwrap_or(0.1), PARAM_LOWER, PARAM_UPPER));
        }
        if self.kind.seasonal {
            v.push(to_unbounded(params.gamma.unwrap_or(0.1), PARAM_LOWER, PARAM_UPPER));
        }
        v.push(state.level);
        if self.kind.trend {
            v.push(state.trend);
        }
        if self.kind.seasonal {
            v.extend_from_slice(&state.seasonal[..self.m - 1]);
        }
        v
    }

    fn unpack(&self, v: &[f64]) -> (EtsParams, EtsState) {
        let mut it = v.iter().copied();
        let mut next = || it.next().unwrap_or(0.0);
        let alpha = match self.fixed_alpha {
            Some(a) => a,
            None => to_bounded(next(), PARAM_LOWER, PARAM_UPPER),
        };
        let beta = self.kind.trend.then(|| to_bounded(next(), PARAM_LOWER, PARAM_UPPER));
        let gamma = self
            .kind
            .seasonal
            .then(|| to_bounded(next(), PARAM_LOWER, PARAM_UPPER));
        let level = next();
        let trend = if self.kind.trend { next() } else { 0.0 };
        let seasonal = if self.kind.seasonal {
            let mut s: Vec<f64> = (0..self.m - 1).map(|_| next()).collect();
            let last = -s.iter().sum::<f64>();
            s.push(last);
            s
        } else {
            Vec::new()
        };
        (
            EtsParams { alpha, beta, gamma },
            EtsState {
                level,
                trend,
                seasonal,
            },
        )
    }
}

/// Gaussian-likelihood AIC. Near-perfect fits are floored at a relative
/// precision of 1e-10 so that exact fits tie and the smaller model wins.
pub fn ets_aic(sse: f64, n: usize, k: usize, y: &[f64]) -> f64 {
    let scale = y.iter().map(|v| v.abs()).sum::<f64>() / y.len().max(1) as f64;
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let floor = n as f64 * (1e-10 * scale).powi(2);
    let n = n as f64;
    n * (sse.max(floor) / n).ln() + 2.0 * k as f64
}

/// Fits one additive ETS model to a raw slice with an explicit period.
pub fn fit_ets_slice(y: &[f64], period: usize, kind: EtsKind, config: &EtsConfig) -> Result<EtsFit> {
    if kind.seasonal && period < 2 {
        return Err(Error::InvalidArgument(format!(
            "{} needs a seasonal period of at least 2",
            kind.name()
        )));
    }
    let required = minimum_length(kind, period);
    if y.len() < required {
        return Err(Error::InsufficientLength {
            required,
            actual: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("series contains missing values".into()));
    }
    let layout = Layout {
        kind,
        m: period,
        fixed_alpha: config.fixed_alpha,
    };
    let init_state = initial_state(kind, y, period)?;
    let init_params = EtsParams {
        alpha: config.fixed_alpha.unwrap_or(0.3),
        beta: kind.trend.then_some(0.05),
        gamma: kind.seasonal.then_some(0.05),
    };

    let sd = std_dev(y);
    let state_step = (0.1 * sd).max(1e-3 * (mean(y).abs() + 1e-8)).max(1e-8);
    let mut steps = vec![1.0; layout.n_smoothing()];
    steps.push(state_step);
    if kind.trend {
        steps.push(state_step / y.len() as f64);
    }
    if kind.seasonal {
        steps.extend(std::iter::repeat(state_step).take(period - 1));
    }

    let objective = |v: &[f64]| {
        let (p, s) = layout.unpack(v);
        run_filter(kind, &p, &s, y, None, None)
    };
    let opts = NelderMeadOptions {
        max_evals: config.max_evals,
        ..NelderMeadOptions::default()
    };

    let mut starts = vec![layout.pack(&init_params, &init_state)];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.restarts {
        let p = EtsParams {
            alpha: config.fixed_alpha.unwrap_or_else(|| rng.gen_range(0.05..0.95)),
            beta: kind.trend.then(|| rng.gen_range(0.01..0.5)),
            gamma: kind.seasonal.then(|| rng.gen_range(0.01..0.5)),
        };
        starts.push(layout.pack(&p, &init_state));
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let first = nelder_mead(objective, start, &steps, opts);
        // one polishing restart around the converged point
        let polished = nelder_mead(objective, &first.x, &steps, opts);
        let candidate = if polished.value <= first.value { polished } else { first };
        if candidate.value.is_finite()
            && best.as_ref().map_or(true, |(_, v)| candidate.value < *v)
        {
            best = Some((candidate.x, candidate.value));
        }
    }
    let (x, _) = best.ok_or_else(|| Error::Fit(format!("{} optimisation diverged", kind.name())))?;
    let (params, initial) = layout.unpack(&x);
    let (fitted, final_state, sse) = ets_filter(kind, &params, &initial, y);
    if !sse.is_finite() {
        return Err(Error::Fit(format!("{} produced a non-finite fit", kind.name())));
    }
    let n_params = layout.n_smoothing() + layout.n_states();
    let aic = ets_aic(sse, y.len(), n_params, y);
    Ok(EtsFit {
        kind,
        period: if kind.seasonal { period } else { 1 },
        params,
        initial,
        final_state,
        fitted,
        sse,
        n_obs: y.len(),
        n_params,
        aic,
    })
}

pub fn fit_ets(ts: &TimeSeries, kind: EtsKind, config: &EtsConfig) -> Result<EtsFit> {
    fit_ets_slice(&ts.values, ts.seasonal_period, kind, config)
}

/// `l + k*b + s[(k-1) mod m]` for `k = 1..=h`.
pub fn forecast_ets(fit: &EtsFit, h: usize) -> Result<Forecast> {
    require_horizon(h)?;
    let (level, trend, seasonal) = fit.components(h);
    let values = (0..h).map(|i| (level[i] + trend[i]) + seasonal[i]).collect();
    Ok(Forecast::new(fit.kind.method(), values).with_info(fit.fit_info()))
}

/// Fits every admissible candidate and keeps the minimum-AIC one (ties go to
/// the earlier candidate in ANN, AAN, ANA, AAA order). Seasonal candidates are
/// skipped when `period < 2` or the series is shorter than two periods.
pub fn select_ets_slice(y: &[f64], period: usize, config: &EtsConfig) -> Result<EtsFit> {
    let mut best: Option<EtsFit> = None;
    let mut last_err = None;
    for kind in EtsKind::AUTO_ORDER {
        if kind.seasonal && (period < 2 || y.len() < 2 * period) {
            continue;
        }
        match fit_ets_slice(y, period, kind, config) {
            Ok(fit) => {
                if best.as_ref().map_or(true, |b| fit.aic < b.aic) {
                    best = Some(fit);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::Fit("no admissible ETS candidate".into()))
    })
}

pub fn select_ets_auto(ts: &TimeSeries, h: usize, config: &EtsConfig) -> Result<Forecast> {
    require_horizon(h)?;
    let s = ts.seasonal_period;
    if s >= 2 && ts.len() < 2 * s {
        return Err(Error::InsufficientLength {
            required: 2 * s,
            actual: ts.len(),
        });
    }
    let fit = select_ets_slice(&ts.values, s, config)?;
    let mut fc = forecast_ets(&fit, h)?;
    fc.method = MethodId::EtsAuto;
    if let Some(info) = fc.fit_info.as_mut() {
        info.note = Some(format!("selected {}", fit.kind.name()));
    }
    Ok(fc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr_free::normal;

    /// Minimal Box-Muller so tests don't need another dependency.
    mod rand_distr_free {
        use rand::Rng;
        pub fn normal<R: Rng>(rng: &mut R) -> f64 {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }

    fn ts(values: Vec<f64>, s: usize) -> TimeSeries {
        TimeSeries::new("e", values).with_seasonal_period(s)
    }

    #[test]
    fn constant_series_fits_exactly() {
        let y = ts(vec![4.2; 30], 7);
        let fit = fit_ets(&y, EtsKind::ANN, &EtsConfig::default()).unwrap();
        assert!(fit.sse < 1e-12, "sse {}", fit.sse);
        let fc = forecast_ets(&fit, 5).unwrap();
        for v in fc.values {
            assert!((v - 4.2).abs() < 1e-6);
        }
    }

    #[test]
    fn alpha_one_reduces_to_naive() {
        let y = ts(vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0], 1);
        let cfg = EtsConfig {
            fixed_alpha: Some(1.0),
            ..EtsConfig::default()
        };
        let fit = fit_ets(&y, EtsKind::ANN, &cfg).unwrap();
        assert_eq!(fit.params.alpha, 1.0);
        let fc = forecast_ets(&fit, 3).unwrap();
        assert_eq!(fc.values, vec![6.0; 3]);
        // one-step fitted values equal the previous observation
        for t in 1..y.len() {
            assert_eq!(fit.fitted[t], y.values[t - 1]);
        }
    }

    #[test]
    fn forecast_function_examples() {
        let make = |kind: EtsKind, state: EtsState| EtsFit {
            kind,
            period: state.seasonal.len().max(1),
            params: EtsParams {
                alpha: 0.5,
                beta: kind.trend.then_some(0.1),
                gamma: kind.seasonal.then_some(0.1),
            },
            initial: state.clone(),
            final_state: state,
            fitted: Vec::new(),
            sse: 0.0,
            n_obs: 0,
            n_params: 0,
            aic: 0.0,
        };
        let ann = make(EtsKind::ANN, EtsState { level: 15.0, trend: 0.0, seasonal: vec![] });
        assert_eq!(forecast_ets(&ann, 3).unwrap().values, vec![15.0; 3]);
        let aan = make(EtsKind::AAN, EtsState { level: 10.0, trend: 2.0, seasonal: vec![] });
        assert_eq!(forecast_ets(&aan, 3).unwrap().values, vec![12.0, 14.0, 16.0]);
        let ana = make(EtsKind::ANA, EtsState { level: 0.0, trend: 0.0, seasonal: vec![1.0, 2.0] });
        assert_eq!(forecast_ets(&ana, 4).unwrap().values, vec![1.0, 2.0, 1.0, 2.0]);
        assert!(forecast_ets(&ana, 0).is_err());
    }

    /// Independent recursion oracle written directly from the update equations.
    fn oracle_fitted(y: &[f64], a: f64, b: f64, g: f64, l0: f64, b0: f64, s0: &[f64]) -> Vec<f64> {
        let m = s0.len();
        let mut level = vec![l0];
        let mut trend = vec![b0];
        // seasonal history indexed so that s[j] is s_{j - m + 1}
        let mut seas: Vec<f64> = s0.to_vec();
        let mut out = Vec::new();
        for (t, &obs) in y.iter().enumerate() {
            let s_tm = seas[t];
            let f = level[t] + trend[t] + s_tm;
            out.push(f);
            let l = a * (obs - s_tm) + (1.0 - a) * (level[t] + trend[t]);
            let bt = b * (l - level[t]) + (1.0 - b) * trend[t];
            let s = g * (obs - l) + (1.0 - g) * s_tm;
            level.push(l);
            trend.push(bt);
            seas.push(s);
            assert_eq!(seas.len(), m + t + 1);
        }
        out
    }

    #[test]
    fn recursion_matches_oracle() {
        let y: Vec<f64> = (0..20).map(|t| 10.0 + (t as f64 * 0.7).sin() * 3.0 + t as f64 * 0.2).collect();
        let s0 = vec![0.5, -0.25, -0.25];
        let initial = EtsState { level: 9.0, trend: 0.1, seasonal: s0.clone() };
        let params = EtsParams { alpha: 0.35, beta: Some(0.12), gamma: Some(0.2) };
        let (fitted, _, _) = ets_filter(EtsKind::AAA, &params, &initial, &y);
        let expected = oracle_fitted(&y, 0.35, 0.12, 0.2, 9.0, 0.1, &s0);
        for (f, e) in fitted.iter().zip(&expected) {
            assert!((f - e).abs() < 1e-10);
        }
    }

    #[test]
    fn noiseless_trend_seasonal_is_reproduced() {
        let pattern = [3.0, -1.0, 0.5, 2.0, -2.5, 1.0, -3.0];
        let full: Vec<f64> = (0..98).map(|t| t as f64 + pattern[t % 7]).collect();
        let y = ts(full[..84].to_vec(), 7);
        let fit = fit_ets(&y, EtsKind::AAA, &EtsConfig::default()).unwrap();
        let fc = forecast_ets(&fit, 14).unwrap();
        for (k, v) in fc.values.iter().enumerate() {
            assert!((v - full[84 + k]).abs() < 1e-4, "step {k}: {v} vs {}", full[84 + k]);
        }
    }

    #[test]
    fn nested_models_have_ordered_sse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<f64> = (0..70)
            .map(|t| 20.0 + 0.1 * t as f64 + [1.0, 0.0, -1.0, 2.0, -2.0, 0.5, -0.5][t % 7] + normal(&mut rng))
            .collect();
        let series = ts(y, 7);
        let cfg = EtsConfig::default();
        let ann = fit_ets(&series, EtsKind::ANN, &cfg).unwrap();
        let aan = fit_ets(&series, EtsKind::AAN, &cfg).unwrap();
        let ana = fit_ets(&series, EtsKind::ANA, &cfg).unwrap();
        let aaa = fit_ets(&series, EtsKind::AAA, &cfg).unwrap();
        let tol = 1e-6 * ann.sse;
        assert!(aan.sse <= ann.sse + tol);
        assert!(ana.sse <= ann.sse + tol);
        assert!(aaa.sse <= aan.sse + tol);
        assert!(aaa.sse <= ana.sse + tol);
    }

    #[test]
    fn seasonal_series_selects_seasonal_model() {
        let pattern = [5.0, -3.0, 1.0, 4.0, -6.0, 2.0, -3.0];
        let y: Vec<f64> = (0..70).map(|t| 100.0 + pattern[t % 7]).collect();
        let fc = select_ets_auto(&ts(y.clone(), 7), 7, &EtsConfig::default()).unwrap();
        let info = fc.fit_info.unwrap();
        assert!(info.model == "ANA" || info.model == "AAA", "{}", info.model);
        // oracle: compare the four AIC values directly
        let cfg = EtsConfig::default();
        let aics: Vec<f64> = EtsKind::AUTO_ORDER
            .iter()
            .map(|&k| fit_ets(&ts(y.clone(), 7), k, &cfg).unwrap().aic)
            .collect();
        let best = aics.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(info.aic.unwrap(), best);
        assert!(aics[0] > best && aics[1] > best);
    }

    #[test]
    fn white_noise_mostly_selects_ann() {
        let mut wins = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let y: Vec<f64> = (0..120).map(|_| 50.0 + normal(&mut rng)).collect();
            let fc = select_ets_auto(&ts(y, 7), 7, &EtsConfig::default()).unwrap();
            if fc.fit_info.unwrap().model == "ANN" {
                wins += 1;
            }
        }
        assert!(wins > 10, "ANN selected {wins}/20 times");
    }

    #[test]
    fn exact_ties_prefer_ann() {
        // a constant series is fitted exactly by all four candidates
        let fc = select_ets_auto(&ts(vec![7.0; 42], 7), 3, &EtsConfig::default()).unwrap();
        assert_eq!(fc.fit_info.unwrap().model, "ANN");
    }

    #[test]
    fn seasonal_template_requires_two_cycles() {
        let y = ts(vec![1.0; 10], 7);
        assert!(matches!(
            fit_ets(&y, EtsKind::ANA, &EtsConfig::default()),
            Err(Error::InsufficientLength { .. })
        ));
    }
}
