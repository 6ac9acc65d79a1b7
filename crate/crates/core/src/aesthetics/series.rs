//! Temporal smoothing of per-frame luminance, shared by the time-lapse
//! scorer and the deflicker stage.

/// Centered moving average over interior frames; the `window / 2` frames at
/// each end take the nearest full window's value. Requires
/// `values.len() >= window` and an odd window.
pub fn smooth_series(values: &[f64], window: usize) -> Vec<f64> {
    let n = values.len();
    let half = window / 2;
    assert!(window % 2 == 1 && n >= window, "series of {n} shorter than window {window}");
    let mut out = vec![0.0; n];
    for k in half..n - half {
        out[k] = values[k - half..=k + half].iter().sum::<f64>() / window as f64;
    }
    for k in 0..half {
        out[k] = out[half];
        out[n - 1 - k] = out[n - 1 - half];
    }
    out
}

/// Mean absolute deviation of interior values from their smoothed series.
pub fn flicker_of_series(values: &[f64], window: usize) -> f64 {
    let smooth = smooth_series(values, window);
    let half = window / 2;
    let interior = half..values.len() - half;
    let count = interior.len();
    interior.map(|k| (values[k] - smooth[k]).abs()).sum::<f64>() / count as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_copy_nearest_window() {
        let s = smooth_series(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], 5);
        assert_eq!(s, vec![3.0, 3.0, 3.0, 4.0, 5.0, 5.0, 5.0]);
    }

    #[test]
    fn linear_ramp_has_no_flicker() {
        let ramp: Vec<f64> = (0..40).map(|k| 0.1 + 0.01 * k as f64).collect();
        assert!(flicker_of_series(&ramp, 5) < 1e-12);
    }

    #[test]
    fn alternating_series() {
        // interior means are 0.48 / 0.52, so every interior deviation is 0.08
        let alt: Vec<f64> = (0..20).map(|k| if k % 2 == 0 { 0.4 } else { 0.6 }).collect();
        let s = smooth_series(&alt, 5);
        assert!((s[2] - 0.48).abs() < 1e-12 && (s[3] - 0.52).abs() < 1e-12);
        assert!((flicker_of_series(&alt, 5) - 0.08).abs() < 1e-12);
    }
}
