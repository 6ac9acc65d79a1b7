use super::consts::*;
use super::image::mean_std;
use super::{flicker_of_series, smooth_series, TimeLapseScore};
use crate::error::{Error, Result};
use crate::render::color::LUMA;
use crate::render::{Frame, FrameSequence};

/// Box-filtered luminance image no larger than `DOWNSAMPLE_MAX`.
fn downsample_luma(frame: &Frame) -> Vec<f64> {
    let (w, h) = (frame.width as usize, frame.height as usize);
    let ow = w.min(DOWNSAMPLE_MAX.0 as usize);
    let oh = h.min(DOWNSAMPLE_MAX.1 as usize);
    let mut sum = vec![0.0; ow * oh];
    let mut count = vec![0u32; ow * oh];
    for y in 0..h {
        let oy = y * oh / h;
        for x in 0..w {
            let ox = x * ow / w;
            let p = &frame.pixels[(y * w + x) * 3..][..3];
            let l = (LUMA[0] * f64::from(p[0]) + LUMA[1] * f64::from(p[1]) + LUMA[2] * f64::from(p[2])) / 255.0;
            sum[oy * ow + ox] += l;
            count[oy * ow + ox] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| s / f64::from(c)).collect()
}

pub fn score_timelapse(frames: &FrameSequence) -> Result<TimeLapseScore> {
    let n = frames.frames.len();
    if n < SMOOTHING_WINDOW {
        return Err(Error::TooFewFrames {
            needed: SMOOTHING_WINDOW,
            got: n,
        });
    }
    frames.validate()?;
    let means = frames.mean_luminances();
    let smooth = smooth_series(&means, SMOOTHING_WINDOW);
    let (lo, hi) = smooth
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let light = ((hi - lo) / LIGHT_DYNAMISM_FULL).clamp(0.0, 1.0);

    let small: Vec<Vec<f64>> = frames.frames.iter().map(downsample_luma).collect();
    let px = small[0].len();
    let mut column = vec![0.0; n];
    let mut std_sum = 0.0;
    for i in 0..px {
        for (c, f) in column.iter_mut().zip(&small) {
            *c = f[i];
        }
        std_sum += mean_std(&column).1;
    }
    let pixel = (std_sum / px as f64 / PIXEL_DYNAMISM_FULL).clamp(0.0, 1.0);

    let flicker = (flicker_of_series(&means, SMOOTHING_WINDOW) / FLICKER_FULL).clamp(0.0, 1.0);
    Ok(TimeLapseScore::new(light, pixel, flicker))
}
