// SPDX-License-Identifier: MIT OR Apache-2.0

//! Derivative-free minimisers for the smoothing-parameter fits.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below this (absolute,
    /// scaled by `1 + |f_best|`).
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evals: 4000,
            f_tol: 1e-12,
            x_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

fn guarded<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Nelder-Mead simplex search started at `x0` with per-coordinate initial
/// steps. The returned point is never worse than `x0`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], steps: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        let value = guarded(&mut f, x0);
        return Minimum {
            x: Vec::new(),
            value,
            evals: 1,
        };
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if steps[i] != 0.0 { steps[i] } else { 0.05 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| guarded(&mut f, v)).collect();
    let mut evals = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();

    while evals < opts.max_evals {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let f_spread = (values[worst] - values[best]).abs();
        let x_spread = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if values[best].is_finite()
            && f_spread <= opts.f_tol * (1.0 + values[best].abs())
            && x_spread <= opts.x_tol.max(1e-8)
        {
            break;
        }
        if x_spread <= opts.x_tol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for &idx in order.iter().take(n) {
            for (c, v) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let f_r = guarded(&mut f, &reflected);
        evals += 1;
        if f_r < values[best] {
            let expanded = along(-2.0);
            let f_e = guarded(&mut f, &expanded);
            evals += 1;
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[worst] {
            let c = along(-0.5);
            let v = guarded(&mut f, &c);
            (c, v)
        } else {
            let c = along(0.5);
            let v = guarded(&mut f, &c);
            (c, v)
        };
        evals += 1;
        if f_c < values[worst].min(f_r) {
            simplex[worst] = contracted;
            values[worst] = f_c;
            continue;
        }
        // shrink towards the best vertex
        let anchor = simplex[best].clone();
        for idx in 0..=n {
            if idx == best {
                continue;
            }
            for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                *x = a + 0.5 * (*x - a);
            }
            values[idx] = guarded(&mut f, &simplex[idx]);
            evals += 1;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        evals,
    }
}

/// Minimises a scalar function on `[lo, hi]`: coarse grid, then golden-section
/// refinement around the best grid point.
pub fn minimize_scalar<F>(mut f: F, lo: f64, hi: f64, grid: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let grid = grid.max(3);
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let points: Vec<f64> = (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect();
    let values: Vec<f64> = points.iter().map(|&x| eval(x)).collect();
    let mut best_i = 0;
    for i in 1..grid {
        if values[i] < values[best_i] {
            best_i = i;
        }
    }
    let mut a = points[best_i.saturating_sub(1)];
    let mut b = points[(best_i + 1).min(grid - 1)];
    let (mut best_x, mut best_v) = (points[best_i], values[best_i]);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    for _ in 0..80 {
        if (b - a).abs() < 1e-10 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best_v {
            best_x = x;
            best_v = v;
        }
    }
    (best_x, best_v)
}

/// Logistic map of an unbounded coordinate into `(lo, hi)`.
pub fn to_bounded(u: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) / (1.0 + (-u).exp())
}

pub fn to_unbounded(x: f64, lo: f64, hi: f64) -> f64 {
    let p = ((x - lo) / (hi - lo)).clamp(1e-12, 1.0 - 1e-12);
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.5, 0.5], NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-4, "{:?}", m);
        assert!((m.x[1] - 1.0).abs() < 1e-4, "{:?}", m);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x.iter().map(|v| v.abs().sqrt()).sum::<f64>();
        let m = nelder_mead(f, &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], NelderMeadOptions::default());
        assert!(m.value <= 0.0);
    }

    #[test]
    fn scalar_parabola() {
        let (x, v) = minimize_scalar(|x| (x - 0.37).powi(2), 0.0, 1.0, 11);
        assert!((x - 0.37).abs() < 1e-6);
        assert!(v < 1e-10);
    }

    #[test]
    fn bounded_transform_round_trip() {
        for x in [0.001, 0.3, 0.9] {
            let u = to_unbounded(x, 1e-4, 0.9999);
            assert!((to_bounded(u, 1e-4, 0.9999) - x).abs() < 1e-12);
        }
    }
}
