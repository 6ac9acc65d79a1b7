//! Deflicker and output packaging.
//!
//! `deflicker` pulls every frame's mean luminance onto the temporally
//! smoothed curve (gain matching) and can additionally equalize the
//! luminance histogram of each frame. `write_output` and `read_output`
//! move sequences to and from a directory of PNG frames plus a manifest.

mod histeq;
mod output;

pub use histeq::{equalize_histogram, luminance_code};
pub use output::{encode_png, frame_file_name, read_output, write_output, FrameRecord, Manifest, MANIFEST_FILE};

use glam::DVec3;
use serde::{Deserialize, Serialize};

use crate::aesthetics::{consts::SMOOTHING_WINDOW, flicker_of_series, smooth_series};
use crate::error::{Error, Result};
use crate::render::color::{encode_u8, srgb_decode};
use crate::render::exposure::{solve_gain_on, MAX_AUTO_GAIN, MIN_AUTO_GAIN};
use crate::render::{Frame, FrameSequence};

/// Floor applied to a frame's mean luminance before forming its gain.
const MIN_MEAN: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeflickerMethod {
    GainMatch,
    Histeq,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeflickerConfig {
    pub window: usize,
    pub method: DeflickerMethod,
    pub gain_min: f64,
    pub gain_max: f64,
}

impl Default for DeflickerConfig {
    fn default() -> Self {
        DeflickerConfig {
            window: SMOOTHING_WINDOW,
            method: DeflickerMethod::GainMatch,
            gain_min: 0.25,
            gain_max: 4.0,
        }
    }
}

impl DeflickerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::validation("window", "must be odd and at least 3"));
        }
        if !(self.gain_min > 0.0 && self.gain_min <= 1.0 && self.gain_max >= 1.0 && self.gain_max.is_finite()) {
            return Err(Error::validation("gain_min", "gain range must satisfy 0 < min <= 1 <= max"));
        }
        Ok(())
    }
}

fn check_length(frames: &FrameSequence, window: usize) -> Result<()> {
    if frames.frames.len() < window {
        return Err(Error::TooFewFrames {
            needed: window,
            got: frames.frames.len(),
        });
    }
    Ok(())
}

/// Mean absolute deviation of per-frame mean luminance from its smoothed
/// curve, over interior frames, with the default window.
pub fn flicker_index(frames: &FrameSequence) -> Result<f64> {
    flicker_index_with(frames, SMOOTHING_WINDOW)
}

pub fn flicker_index_with(frames: &FrameSequence, window: usize) -> Result<f64> {
    check_length(frames, window)?;
    Ok(flicker_of_series(&frames.mean_luminances(), window))
}

fn decode_table() -> [f64; 256] {
    std::array::from_fn(|v| srgb_decode(v as f64 / 255.0))
}

/// Rescales a frame in linear light so its mean luminance lands on `target`.
fn match_mean(frame: &Frame, target: f64, table: &[f64; 256]) -> Frame {
    let linear: Vec<DVec3> = frame
        .pixels
        .chunks_exact(3)
        .map(|p| DVec3::new(table[p[0] as usize], table[p[1] as usize], table[p[2] as usize]))
        .collect();
    let gain = solve_gain_on(&linear, target, MIN_AUTO_GAIN, MAX_AUTO_GAIN);
    let pixels = linear
        .iter()
        .flat_map(|c| [encode_u8(c.x * gain), encode_u8(c.y * gain), encode_u8(c.z * gain)])
        .collect();
    Frame {
        pixels,
        ..frame.clone()
    }
}

/// Gain matching: each frame's mean luminance is moved to its smoothed value,
/// with the ratio clamped to the configured range. Frames already within half
/// a code value of their target are left untouched, and if the result would
/// flicker more than the input, the input is returned.
fn gain_match(frames: &FrameSequence, config: &DeflickerConfig) -> FrameSequence {
    let means = frames.mean_luminances();
    let smooth = smooth_series(&means, config.window);
    let table = decode_table();
    let out_frames: Vec<Frame> = frames
        .frames
        .iter()
        .zip(means.iter().zip(&smooth))
        .map(|(f, (&mu, &mu_s))| {
            let ratio = (mu_s / mu.max(MIN_MEAN)).clamp(config.gain_min, config.gain_max);
            let target = mu * ratio;
            if (target - mu).abs() < 0.5 / 255.0 {
                f.clone()
            } else {
                match_mean(f, target, &table)
            }
        })
        .collect();
    let out = FrameSequence {
        frames: out_frames,
        ..frames.clone()
    };
    let before = flicker_of_series(&means, config.window);
    let after = flicker_of_series(&out.mean_luminances(), config.window);
    if after > before {
        frames.clone()
    } else {
        out
    }
}

fn equalize_all(frames: &FrameSequence) -> FrameSequence {
    FrameSequence {
        frames: frames.frames.iter().map(equalize_histogram).collect(),
        ..frames.clone()
    }
}

/// Removes exposure flicker. Frame count, dimensions, timestamps and poses
/// are preserved.
pub fn deflicker(frames: &FrameSequence, config: &DeflickerConfig) -> Result<FrameSequence> {
    config.validate()?;
    check_length(frames, config.window)?;
    frames.validate()?;
    Ok(match config.method {
        DeflickerMethod::GainMatch => gain_match(frames, config),
        DeflickerMethod::Histeq => equalize_all(frames),
        DeflickerMethod::Both => equalize_all(&gain_match(frames, config)),
    })
}
