use super::consts::*;
use super::{ImageScore, SalientPoint};
use crate::render::color::LUMA;
use crate::render::Frame;

const THIRDS: [f64; 2] = [1.0 / 3.0, 2.0 / 3.0];

pub fn score_image(frame: &Frame, salient: &[SalientPoint]) -> ImageScore {
    let rgb: Vec<[f64; 3]> = frame
        .pixels
        .chunks_exact(3)
        .map(|p| [f64::from(p[0]) / 255.0, f64::from(p[1]) / 255.0, f64::from(p[2]) / 255.0])
        .collect();
    score_rgb(&rgb, salient)
}

/// Image score of normalized RGB values in [0, 1].
pub fn score_rgb(pixels: &[[f64; 3]], salient: &[SalientPoint]) -> ImageScore {
    let luma: Vec<f64> = pixels
        .iter()
        .map(|c| LUMA[0] * c[0] + LUMA[1] * c[1] + LUMA[2] * c[2])
        .collect();
    let rg: Vec<f64> = pixels.iter().map(|c| c[0] - c[1]).collect();
    let yb: Vec<f64> = pixels.iter().map(|c| (c[0] + c[1]) / 2.0 - c[2]).collect();
    let (mu_y, sd_y) = mean_std(&luma);
    let (mu_rg, sd_rg) = mean_std(&rg);
    let (mu_yb, sd_yb) = mean_std(&yb);

    let exposure = (-(mu_y - EXPOSURE_CENTER).powi(2) / (2.0 * EXPOSURE_WIDTH * EXPOSURE_WIDTH)).exp();
    let contrast = (sd_y / CONTRAST_FULL).clamp(0.0, 1.0);
    let m = sd_rg.hypot(sd_yb) + COLORFULNESS_MEAN_WEIGHT * mu_rg.hypot(mu_yb);
    let colorfulness = (m / COLORFULNESS_FULL).clamp(0.0, 1.0);
    ImageScore::new(exposure, contrast, colorfulness, thirds_score(salient))
}

/// Population mean and standard deviation; (0, 0) for an empty slice.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Rule-of-thirds score for the saliency-weighted centroid.
pub(crate) fn thirds_score(salient: &[SalientPoint]) -> f64 {
    let total: f64 = salient.iter().map(|s| s.weight).sum();
    if salient.is_empty() || total <= 0.0 {
        return THIRDS_NO_SUBJECT;
    }
    let cx = salient.iter().map(|s| s.weight * s.xy[0]).sum::<f64>() / total;
    let cy = salient.iter().map(|s| s.weight * s.xy[1]).sum::<f64>() / total;
    let d2 = THIRDS
        .iter()
        .flat_map(|&x| THIRDS.iter().map(move |&y| (cx - x).powi(2) + (cy - y).powi(2)))
        .fold(f64::INFINITY, f64::min);
    (-d2 / (2.0 * THIRDS_WIDTH * THIRDS_WIDTH)).exp()
}
