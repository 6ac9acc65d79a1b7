//! Deterministic software renderer.
//!
//! `render_frame` ray-casts the ground, solids and agents, shades them with
//! the sun at the frame's timestamp, and then applies a simulated camera
//! exposure. Auto exposure aims for a fixed mean luminance and adds a seeded
//! log-normal error per frame, which is the flicker that
//! [`crate::postproc`] removes.

pub mod color;
pub(crate) mod exposure;
mod raycast;

pub use exposure::{auto_exposure_target, jitter_draw, AUTO_TARGET, MAX_AUTO_GAIN, MIN_AUTO_GAIN};

use glam::DVec3;
use serde::{Deserialize, Serialize};

use crate::aesthetics::QualityScore;
use crate::error::{Error, Result};
use crate::optimize::ShootingParameters;
use crate::scene::{agent_positions, sun_state, SceneDescription};
use crate::time::Timestamp;

use raycast::{camera_basis, Tracer};

pub const DEFAULT_FPS: f64 = 24.0;

/// Camera position and orientation. Yaw is counterclockwise from +x about
/// +z; pitch is positive up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraPose {
    pub position: [f64; 3],
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub vfov_deg: f64,
}

impl CameraPose {
    pub fn validate(&self) -> Result<()> {
        if self.position.iter().any(|v| !v.is_finite()) || !self.yaw_deg.is_finite() {
            return Err(Error::validation("pose.position", "must be finite"));
        }
        if !(-89.0..=89.0).contains(&self.pitch_deg) {
            return Err(Error::validation("pose.pitch_deg", "must lie in [-89, 89]"));
        }
        if !(self.vfov_deg > 10.0 && self.vfov_deg < 120.0) {
            return Err(Error::validation("pose.vfov_deg", "must lie in (10, 120)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExposureMode {
    /// Mean-luminance targeting with per-frame log-normal error.
    Auto { jitter_sigma: f64 },
    Manual { gain: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderSettings {
    pub width: u32,
    pub height: u32,
    pub exposure_mode: ExposureMode,
    pub shadows: bool,
    pub seed: u64,
}

impl RenderSettings {
    /// Low-resolution, jitter-free settings used by the optimizer.
    pub fn probe() -> Self {
        RenderSettings {
            width: 96,
            height: 54,
            exposure_mode: ExposureMode::Auto { jitter_sigma: 0.0 },
            shadows: true,
            seed: 0,
        }
    }

    pub fn final_output(jitter_sigma: f64, seed: u64) -> Self {
        RenderSettings {
            width: 640,
            height: 360,
            exposure_mode: ExposureMode::Auto { jitter_sigma },
            shadows: true,
            seed,
        }
    }

    pub fn with_size(self, width: u32, height: u32) -> Self {
        RenderSettings { width, height, ..self }
    }

    pub fn aspect(&self) -> f64 {
        f64::from(self.width) / f64::from(self.height)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 16 || self.height < 16 {
            return Err(Error::validation("settings.width", "frames must be at least 16x16"));
        }
        match self.exposure_mode {
            ExposureMode::Auto { jitter_sigma } if !(0.0..=0.2).contains(&jitter_sigma) => Err(
                Error::validation("settings.exposure_mode.jitter_sigma", "must lie in [0, 0.2]"),
            ),
            ExposureMode::Manual { gain } if !(gain > 0.0 && gain.is_finite()) => {
                Err(Error::validation("settings.exposure_mode.gain", "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// One rendered 8-bit RGB image.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB, `width * height * 3` bytes.
    pub pixels: Vec<u8>,
    pub timestamp: Timestamp,
    pub pose: CameraPose,
    /// Mean linear luminance before the exposure gain.
    pub pre_gain_mean_luminance: f64,
}

impl Frame {
    pub fn mean_luminance(&self) -> f64 {
        color::mean_luminance(&self.pixels)
    }

    pub fn aspect(&self) -> f64 {
        f64::from(self.width) / f64::from(self.height)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    pub frames: Vec<Frame>,
    pub params: ShootingParameters,
    pub fps_playback: f64,
    /// Score report carried along to the output manifest.
    pub score: Option<QualityScore>,
}

impl FrameSequence {
    pub fn poses(&self) -> Vec<CameraPose> {
        self.frames.iter().map(|f| f.pose).collect()
    }

    pub fn mean_luminances(&self) -> Vec<f64> {
        self.frames.iter().map(Frame::mean_luminance).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(first) = self.frames.first() {
            for (i, f) in self.frames.iter().enumerate() {
                if f.width != first.width || f.height != first.height {
                    return Err(Error::validation(format!("frames[{i}]"), "dimensions differ"));
                }
                if f.pixels.len() != (f.width * f.height * 3) as usize {
                    return Err(Error::validation(format!("frames[{i}].pixels"), "wrong length"));
                }
            }
            for (i, w) in self.frames.windows(2).enumerate() {
                if w[1].timestamp <= w[0].timestamp {
                    return Err(Error::validation(
                        format!("frames[{}].timestamp", i + 1),
                        "timestamps must be strictly increasing",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Renders one frame. Identical inputs give byte-identical output.
pub fn render_frame(
    scene: &SceneDescription,
    pose: &CameraPose,
    t: &Timestamp,
    settings: &RenderSettings,
) -> Result<Frame> {
    pose.validate()?;
    settings.validate()?;
    let linear = render_linear(scene, pose, t, settings);
    let pre_gain = linear.iter().map(|c| luma(*c)).sum::<f64>() / linear.len() as f64;
    let gain = match settings.exposure_mode {
        ExposureMode::Manual { gain } => gain,
        ExposureMode::Auto { jitter_sigma } => {
            let target = auto_exposure_target(jitter_sigma, settings.seed, t);
            exposure::solve_gain(&linear, target)
        }
    };
    let mut pixels = Vec::with_capacity(linear.len() * 3);
    for c in &linear {
        for k in 0..3 {
            pixels.push(color::encode_u8(c[k] * gain));
        }
    }
    Ok(Frame {
        width: settings.width,
        height: settings.height,
        pixels,
        timestamp: *t,
        pose: *pose,
        pre_gain_mean_luminance: pre_gain,
    })
}

fn luma(c: DVec3) -> f64 {
    color::LUMA[0] * c.x + color::LUMA[1] * c.y + color::LUMA[2] * c.z
}

/// Linear radiance per pixel, row-major.
fn render_linear(
    scene: &SceneDescription,
    pose: &CameraPose,
    t: &Timestamp,
    settings: &RenderSettings,
) -> Vec<DVec3> {
    let sun = sun_state(&scene.georef, t);
    let agents = agent_positions(scene, t, settings.seed);
    let tracer = Tracer::new(scene, sun, &agents, settings.shadows);
    let (forward, right, up) = camera_basis(pose);
    let origin = DVec3::from_array(pose.position);
    let (w, h) = (settings.width, settings.height);
    let tan_half = (pose.vfov_deg.to_radians() / 2.0).tan();
    let aspect = settings.aspect();
    let mut out = Vec::with_capacity((w * h) as usize);
    for j in 0..h {
        let y = (1.0 - 2.0 * (f64::from(j) + 0.5) / f64::from(h)) * tan_half;
        for i in 0..w {
            let x = (2.0 * (f64::from(i) + 0.5) / f64::from(w) - 1.0) * tan_half * aspect;
            let dir = (forward + right * x + up * y).normalize();
            out.push(tracer.trace(origin, dir));
        }
    }
    out
}

/// Renders frames at `start + k * interval` for `k = 0..=floor(span / interval)`,
/// with the camera at path progress `k / max(1, K - 1)`.
pub fn render_sequence(
    scene: &SceneDescription,
    params: &ShootingParameters,
    settings: &RenderSettings,
) -> Result<FrameSequence> {
    params.validate(scene)?;
    let count = params.timewarp.frame_count();
    let denom = (count.max(2) - 1) as f64;
    let frames = (0..count)
        .map(|k| {
            let t = params.timewarp.frame_time(k);
            let pose = params.path.pose_at(scene, k as f64 / denom)?;
            render_frame(scene, &pose, &t, settings)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameSequence {
        frames,
        params: *params,
        fps_playback: DEFAULT_FPS,
        score: None,
    })
}
