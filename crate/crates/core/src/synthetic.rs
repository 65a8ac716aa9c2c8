// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded generator of positive daily series with weekly seasonality,
//! mixing trend, random-walk, level-shift and noise regimes so that
//! different forecasters win on different series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::series::TimeSeries;
use crate::stats::derive_seed;

const PERIOD: usize = 7;

/// `n` series of length `len`, ids `s000`, `s001`, ...
pub fn synthetic_collection(n: usize, len: usize, seed: u64) -> Vec<TimeSeries> {
    (0..n)
        .map(|i| synthetic_series(&format!("s{i:03}"), len, derive_seed(seed, &[i as u64])))
        .collect()
}

pub fn synthetic_series(id: &str, len: usize, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let level = rng.gen_range(15.0..40.0);
    let season_amp = level * rng.gen_range(0.0..0.5);
    let pattern: Vec<f64> = (0..PERIOD).map(|_| std.sample(&mut rng)).collect();
    let pattern_mean = pattern.iter().sum::<f64>() / PERIOD as f64;
    let slope = level * rng.gen_range(-0.002..0.004) * f64::from(rng.gen_bool(0.5));
    let walk_sd = level * rng.gen_range(0.0..0.04) * f64::from(rng.gen_bool(0.4));
    let noise_sd = level * rng.gen_range(0.02..0.25);
    let shift_at = rng.gen_bool(0.3).then(|| rng.gen_range(len / 3..len.max(4) * 2 / 3 + 1));
    let shift = level * rng.gen_range(-0.3..0.3);
    let drift = rng.gen_range(0.0..1.0) < 0.25;

    let mut walk = 0.0;
    let values = (0..len)
        .map(|t| {
            walk += walk_sd * std.sample(&mut rng);
            let mut amp = season_amp;
            if drift {
                amp *= 0.5 + t as f64 / len as f64;
            }
            let mut v = level + slope * t as f64 + walk + amp * (pattern[t % PERIOD] - pattern_mean);
            if shift_at.is_some_and(|s| t >= s) {
                v += shift;
            }
            v += noise_sd * std.sample(&mut rng);
            v.max(0.5)
        })
        .collect();
    TimeSeries::new(id, values).with_seasonal_period(PERIOD)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_positive() {
        let a = synthetic_collection(5, 100, 3);
        assert_eq!(a, synthetic_collection(5, 100, 3));
        assert_ne!(a, synthetic_collection(5, 100, 4));
        assert!(a.iter().all(|s| s.len() == 100 && s.values.iter().all(|v| *v > 0.0)));
        assert_eq!(a[2].id, "s002");
    }
}
