//! Simulated camera exposure.

use std::sync::OnceLock;

use glam::DVec3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::color::{srgb_encode, LUMA};
use crate::time::{nanos_since_epoch, Timestamp};

/// Mean encoded luminance that auto exposure aims for.
pub const AUTO_TARGET: f64 = 0.45;
pub const MIN_AUTO_GAIN: f64 = 1.0 / 64.0;
pub const MAX_AUTO_GAIN: f64 = 64.0;
const MAX_TARGET: f64 = 0.95;
const SOLVE_SAMPLES: usize = 16_384;
const SOLVE_ITERATIONS: usize = 24;
const LUT_SIZE: usize = 8192;

/// Standard normal draw keyed on `(seed, t)`.
pub fn jitter_draw(seed: u64, t: &Timestamp) -> f64 {
    let ns = nanos_since_epoch(t) as u128;
    let key = seed ^ (ns as u64).rotate_left(17) ^ ((ns >> 64) as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    StandardNormal.sample(&mut rng)
}

/// Mean luminance auto exposure aims for at `t`: `0.45 * exp(sigma * z)`.
pub fn auto_exposure_target(jitter_sigma: f64, seed: u64, t: &Timestamp) -> f64 {
    if jitter_sigma == 0.0 {
        return AUTO_TARGET;
    }
    (AUTO_TARGET * (jitter_sigma * jitter_draw(seed, t)).exp()).min(MAX_TARGET)
}

fn encode_lut() -> &'static [f64] {
    static LUT: OnceLock<Vec<f64>> = OnceLock::new();
    LUT.get_or_init(|| {
        (0..=LUT_SIZE)
            .map(|i| srgb_encode(i as f64 / LUT_SIZE as f64))
            .collect()
    })
}

fn encode_fast(lut: &[f64], linear: f64) -> f64 {
    let x = linear.clamp(0.0, 1.0) * LUT_SIZE as f64;
    let i = (x as usize).min(LUT_SIZE - 1);
    let f = x - i as f64;
    lut[i] + (lut[i + 1] - lut[i]) * f
}

/// Mean encoded luminance of `samples` scaled by `gain`, before quantization.
pub(crate) fn encoded_mean(samples: &[DVec3], gain: f64) -> f64 {
    let lut = encode_lut();
    let total: f64 = samples
        .iter()
        .map(|c| {
            LUMA[0] * encode_fast(lut, c.x * gain)
                + LUMA[1] * encode_fast(lut, c.y * gain)
                + LUMA[2] * encode_fast(lut, c.z * gain)
        })
        .sum();
    total / samples.len().max(1) as f64
}

/// Gain in `[MIN_AUTO_GAIN, MAX_AUTO_GAIN]` whose encoded mean luminance
/// hits `target`, clamped at the range ends.
pub(crate) fn solve_gain(linear: &[DVec3], target: f64) -> f64 {
    let stride = linear.len().div_ceil(SOLVE_SAMPLES).max(1);
    let samples: Vec<DVec3> = linear.iter().step_by(stride).copied().collect();
    solve_gain_on(&samples, target, MIN_AUTO_GAIN, MAX_AUTO_GAIN)
}

/// Bisection in log-gain for a monotone encoded mean.
pub(crate) fn solve_gain_on(samples: &[DVec3], target: f64, min_gain: f64, max_gain: f64) -> f64 {
    if encoded_mean(samples, max_gain) <= target {
        return max_gain;
    }
    if encoded_mean(samples, min_gain) >= target {
        return min_gain;
    }
    let (mut lo, mut hi) = (min_gain.ln(), max_gain.ln());
    for _ in 0..SOLVE_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if encoded_mean(samples, mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    #[test]
    fn lut_tracks_exact_encode() {
        let lut = encode_lut();
        for i in 0..10_000 {
            let x = i as f64 / 10_000.0;
            assert!((encode_fast(lut, x) - srgb_encode(x)).abs() < 2e-4, "{x}");
        }
    }

    #[test]
    fn solved_gain_hits_target() {
        let samples: Vec<DVec3> = (0..500)
            .map(|i| DVec3::splat(0.002 + 0.0001 * f64::from(i)))
            .collect();
        let g = solve_gain_on(&samples, 0.45, MIN_AUTO_GAIN, MAX_AUTO_GAIN);
        assert!((encoded_mean(&samples, g) - 0.45).abs() < 1e-4);
    }

    #[test]
    fn unreachable_targets_clamp() {
        let black = vec![DVec3::ZERO; 10];
        assert_eq!(solve_gain_on(&black, 0.45, MIN_AUTO_GAIN, MAX_AUTO_GAIN), MAX_AUTO_GAIN);
        let white = vec![DVec3::splat(50.0); 10];
        assert_eq!(solve_gain_on(&white, 0.45, MIN_AUTO_GAIN, MAX_AUTO_GAIN), MIN_AUTO_GAIN);
    }

    #[test]
    fn jitter_is_keyed_on_seed_and_time() {
        let t = Utc.with_ymd_and_hms(2024, 6, 21, 12, 0, 0).unwrap();
        let u = Utc.with_ymd_and_hms(2024, 6, 21, 12, 0, 30).unwrap();
        assert_eq!(jitter_draw(3, &t), jitter_draw(3, &t));
        assert_ne!(jitter_draw(3, &t), jitter_draw(4, &t));
        assert_ne!(jitter_draw(3, &t), jitter_draw(3, &u));
        assert_eq!(auto_exposure_target(0.0, 3, &t), AUTO_TARGET);
    }

    #[test]
    fn jitter_draws_look_standard_normal() {
        let base = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
        let draws: Vec<f64> = (0..4000)
            .map(|k| jitter_draw(11, &(base + chrono::Duration::seconds(30 * k))))
            .collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 0.06, "{mean}");
        assert!((var - 1.0).abs() < 0.08, "{var}");
    }
}
