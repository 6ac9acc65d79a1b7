//! Deterministic aesthetic scorers for single frames, camera motion and
//! time-lapse dynamics, and the combined assessment of a rendered sequence.
//!
//! Every weight and normalization constant lives in [`consts`]. Alternative
//! scorers plug in through [`AestheticModel`]; [`HeuristicModel`] is the
//! closed-form default used everywhere unless replaced.

mod image;
mod project;
mod series;
mod timelapse;
mod video;

pub use image::{score_image, score_rgb};
pub use project::{project_landmarks, project_point, SalientPoint};
pub use series::{flicker_of_series, smooth_series};
pub use timelapse::score_timelapse;
pub use video::score_video;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::render::{CameraPose, Frame, FrameSequence};
use crate::scene::SceneDescription;

pub mod consts {
    /// Mean luminance that scores a perfect exposure.
    pub const EXPOSURE_CENTER: f64 = 0.5;
    pub const EXPOSURE_WIDTH: f64 = 0.18;
    /// Luminance standard deviation that saturates the contrast term.
    pub const CONTRAST_FULL: f64 = 0.25;
    pub const COLORFULNESS_FULL: f64 = 0.3;
    pub const COLORFULNESS_MEAN_WEIGHT: f64 = 0.3;
    pub const THIRDS_WIDTH: f64 = 0.1;
    /// Thirds score when no salient point is visible.
    pub const THIRDS_NO_SUBJECT: f64 = 0.5;

    /// Acceleration scale as a fraction of the scene diagonal.
    pub const TRANSLATION_SCALE: f64 = 0.001;
    pub const ROTATION_SCALE_DEG: f64 = 0.5;
    /// The primary landmark must stay inside this central fraction.
    pub const FRAMING_CENTRAL: f64 = 0.8;

    pub const SMOOTHING_WINDOW: usize = 5;
    pub const LIGHT_DYNAMISM_FULL: f64 = 0.3;
    pub const PIXEL_DYNAMISM_FULL: f64 = 0.08;
    pub const FLICKER_FULL: f64 = 0.05;
    pub const DOWNSAMPLE_MAX: (u32, u32) = (64, 36);
    pub const LIGHT_WEIGHT: f64 = 0.25;
    pub const PIXEL_WEIGHT: f64 = 0.25;
    pub const STEADINESS_WEIGHT: f64 = 0.5;

    /// Frames sampled for the image term of an assessment.
    pub const ASSESS_IMAGE_SAMPLES: usize = 9;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub exposure: f64,
    pub contrast: f64,
    pub colorfulness: f64,
    pub thirds: f64,
    pub q_i: f64,
}

impl ImageScore {
    pub fn new(exposure: f64, contrast: f64, colorfulness: f64, thirds: f64) -> Self {
        ImageScore {
            exposure,
            contrast,
            colorfulness,
            thirds,
            q_i: 0.25 * (exposure + contrast + colorfulness + thirds),
        }
    }

    /// Component-wise mean; `None` for an empty slice.
    pub fn mean(scores: &[ImageScore]) -> Option<ImageScore> {
        if scores.is_empty() {
            return None;
        }
        let n = scores.len() as f64;
        let avg = |f: fn(&ImageScore) -> f64| scores.iter().map(f).sum::<f64>() / n;
        Some(ImageScore::new(
            avg(|s| s.exposure),
            avg(|s| s.contrast),
            avg(|s| s.colorfulness),
            avg(|s| s.thirds),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoScore {
    pub translational_smoothness: f64,
    pub rotational_smoothness: f64,
    pub framing_persistence: f64,
    pub q_v: f64,
}

impl VideoScore {
    pub fn new(translational: f64, rotational: f64, framing: f64) -> Self {
        VideoScore {
            translational_smoothness: translational,
            rotational_smoothness: rotational,
            framing_persistence: framing,
            q_v: (translational + rotational + framing) / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeLapseScore {
    pub light_dynamism: f64,
    pub pixel_dynamism: f64,
    pub flicker_penalty: f64,
    pub q_t: f64,
}

impl TimeLapseScore {
    pub fn new(light: f64, pixel: f64, flicker: f64) -> Self {
        TimeLapseScore {
            light_dynamism: light,
            pixel_dynamism: pixel,
            flicker_penalty: flicker,
            q_t: consts::LIGHT_WEIGHT * light
                + consts::PIXEL_WEIGHT * pixel
                + consts::STEADINESS_WEIGHT * (1.0 - flicker),
        }
    }
}

/// Image, video and time-lapse terms and their normalized sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub q_i: f64,
    pub q_v: f64,
    pub q_t: f64,
    pub total: f64,
}

impl QualityScore {
    pub fn new(q_i: f64, q_v: f64, q_t: f64) -> Self {
        QualityScore {
            q_i,
            q_v,
            q_t,
            total: (q_i + q_v + q_t) / 3.0,
        }
    }
}

/// Full score report: every component plus the aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub image: ImageScore,
    pub video: VideoScore,
    pub timelapse: TimeLapseScore,
    pub quality: QualityScore,
}

/// Replaceable scoring backend.
pub trait AestheticModel: Send + Sync {
    fn score_image(&self, frame: &Frame, salient: &[SalientPoint]) -> ImageScore;

    fn score_video(&self, poses: &[CameraPose], scene: &SceneDescription, aspect: f64) -> Result<VideoScore>;

    fn score_timelapse(&self, frames: &FrameSequence) -> Result<TimeLapseScore>;
}

/// The closed-form scorers defined in this module.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicModel;

impl AestheticModel for HeuristicModel {
    fn score_image(&self, frame: &Frame, salient: &[SalientPoint]) -> ImageScore {
        score_image(frame, salient)
    }

    fn score_video(&self, poses: &[CameraPose], scene: &SceneDescription, aspect: f64) -> Result<VideoScore> {
        score_video(poses, scene, aspect)
    }

    fn score_timelapse(&self, frames: &FrameSequence) -> Result<TimeLapseScore> {
        score_timelapse(frames)
    }
}

/// Image score of one frame with its landmarks projected from the frame's pose.
pub fn score_frame(model: &dyn AestheticModel, scene: &SceneDescription, frame: &Frame) -> ImageScore {
    let salient = project_landmarks(scene, &frame.pose, frame.aspect());
    model.score_image(frame, &salient)
}

/// Indices of up to `count` uniformly spread frames, endpoints included.
pub fn sample_indices(len: usize, count: usize) -> Vec<usize> {
    if len <= count {
        return (0..len).collect();
    }
    let last = (len - 1) as f64;
    (0..count)
        .map(|i| (i as f64 * last / (count - 1) as f64).round() as usize)
        .collect()
}

pub fn assess_detailed(
    model: &dyn AestheticModel,
    frames: &FrameSequence,
    scene: &SceneDescription,
) -> Result<ScoreReport> {
    frames.validate()?;
    let image_scores: Vec<ImageScore> = sample_indices(frames.frames.len(), consts::ASSESS_IMAGE_SAMPLES)
        .into_iter()
        .map(|i| score_frame(model, scene, &frames.frames[i]))
        .collect();
    let aspect = frames.frames.first().map_or(16.0 / 9.0, Frame::aspect);
    let video = model.score_video(&frames.poses(), scene, aspect)?;
    let timelapse = model.score_timelapse(frames)?;
    let image = ImageScore::mean(&image_scores).ok_or(crate::Error::TooFewFrames { needed: 1, got: 0 })?;
    Ok(ScoreReport {
        image,
        video,
        timelapse,
        quality: QualityScore::new(image.q_i, video.q_v, timelapse.q_t),
    })
}

/// Scores a rendered sequence with the default heuristic model.
pub fn assess(frames: &FrameSequence, scene: &SceneDescription) -> Result<QualityScore> {
    assess_detailed(&HeuristicModel, frames, scene).map(|r| r.quality)
}
