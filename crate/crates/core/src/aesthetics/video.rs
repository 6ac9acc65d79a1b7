use super::consts::*;
use super::{project_point, VideoScore};
use crate::error::{Error, Result};
use crate::render::CameraPose;
use crate::scene::SceneDescription;

/// Wraps an angle difference into (-180, 180].
fn wrap_deg(d: f64) -> f64 {
    let r = d.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Scores camera motion over a pose series sampled at equal time steps.
pub fn score_video(poses: &[CameraPose], scene: &SceneDescription, aspect: f64) -> Result<VideoScore> {
    if poses.len() < 3 {
        return Err(Error::TooFewFrames {
            needed: 3,
            got: poses.len(),
        });
    }
    let diag = scene.diagonal();
    let mut accel = 0.0;
    let mut angular = 0.0;
    for w in poses.windows(3) {
        let a: f64 = (0..3)
            .map(|i| (w[2].position[i] - 2.0 * w[1].position[i] + w[0].position[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        accel += a / diag;
        let yaw = wrap_deg(w[2].yaw_deg - w[1].yaw_deg) - wrap_deg(w[1].yaw_deg - w[0].yaw_deg);
        let pitch = w[2].pitch_deg - 2.0 * w[1].pitch_deg + w[0].pitch_deg;
        angular += yaw.hypot(pitch);
    }
    let n = (poses.len() - 2) as f64;
    let translational = (-(accel / n) / TRANSLATION_SCALE).exp();
    let rotational = (-(angular / n) / ROTATION_SCALE_DEG).exp();

    let framing = match scene.primary_landmark() {
        None => 1.0,
        Some(l) => {
            let lo = (1.0 - FRAMING_CENTRAL) / 2.0;
            let hi = 1.0 - lo;
            let inside = poses
                .iter()
                .filter(|p| {
                    project_point(p, l.center, aspect)
                        .is_some_and(|xy| xy.iter().all(|v| (lo..=hi).contains(v)))
                })
                .count();
            inside as f64 / poses.len() as f64
        }
    };
    Ok(VideoScore::new(translational, rotational, framing))
}
