//! The shooting parameter vector: viewfinder, camera path and time warp.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::render::CameraPose;
use crate::scene::{is_reachable, SceneDescription};
use crate::time::{self, Timestamp};

/// Vertical field of view used for every shot.
pub const SHOT_VFOV_DEG: f64 = 55.0;

/// Number of path samples checked for reachability.
const PATH_CHECK_SAMPLES: usize = 16;

/// Camera location and aim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewfinderParams {
    pub location: [f64; 3],
    pub yaw_deg: f64,
    pub pitch_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    Static,
    Pan,
    Truck,
    Orbit,
}

impl PathMode {
    pub const ALL: [PathMode; 4] = [PathMode::Static, PathMode::Pan, PathMode::Truck, PathMode::Orbit];
}

/// Camera movement over the capture window. The motion is centered on
/// `base`: progress 0.5 always reproduces the viewfinder pose.
///
/// `amplitude` is the total sweep in degrees for pan and orbit, the lateral
/// travel in meters for truck, and 0 for static.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraPath {
    pub mode: PathMode,
    pub amplitude: f64,
    pub base: ViewfinderParams,
}

impl CameraPath {
    pub fn fixed(base: ViewfinderParams) -> Self {
        CameraPath {
            mode: PathMode::Static,
            amplitude: 0.0,
            base,
        }
    }

    /// Camera pose at `progress` in [0, 1].
    pub fn pose_at(&self, scene: &SceneDescription, progress: f64) -> Result<CameraPose> {
        let b = &self.base;
        let offset = progress.clamp(0.0, 1.0) - 0.5;
        let (position, yaw_deg) = match self.mode {
            PathMode::Static => (b.location, b.yaw_deg),
            PathMode::Pan => (b.location, b.yaw_deg + self.amplitude * offset),
            PathMode::Truck => {
                // travel along the camera's right vector
                let yaw = b.yaw_deg.to_radians();
                let d = self.amplitude * offset;
                (
                    [b.location[0] + d * yaw.sin(), b.location[1] - d * yaw.cos(), b.location[2]],
                    b.yaw_deg,
                )
            }
            PathMode::Orbit => {
                let pivot = scene
                    .primary_landmark()
                    .ok_or_else(|| Error::validation("path.mode", "orbit needs a landmark to pivot on"))?
                    .center;
                let angle = (self.amplitude * offset).to_radians();
                let (dx, dy) = (b.location[0] - pivot[0], b.location[1] - pivot[1]);
                let (s, c) = angle.sin_cos();
                (
                    [pivot[0] + c * dx - s * dy, pivot[1] + s * dx + c * dy, b.location[2]],
                    b.yaw_deg + self.amplitude * offset,
                )
            }
        };
        Ok(CameraPose {
            position,
            yaw_deg,
            pitch_deg: b.pitch_deg,
            vfov_deg: SHOT_VFOV_DEG,
        })
    }

    /// Poses at `count` uniformly spaced progress values, endpoints included.
    pub fn sample(&self, scene: &SceneDescription, count: usize) -> Result<Vec<CameraPose>> {
        (0..count)
            .map(|k| self.pose_at(scene, k as f64 / (count.max(2) - 1) as f64))
            .collect()
    }
}

/// Capture window `[start, end]` and frame interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeWarpParams {
    #[serde(with = "time::iso")]
    pub start: Timestamp,
    #[serde(with = "time::iso")]
    pub end: Timestamp,
    pub interval_s: f64,
}

impl TimeWarpParams {
    pub(crate) fn interval_nanos(&self) -> i128 {
        (self.interval_s * 1e9).round() as i128
    }

    /// `floor((end - start) / interval) + 1`.
    pub fn frame_count(&self) -> usize {
        let span = time::nanos_since_epoch(&self.end) - time::nanos_since_epoch(&self.start);
        (span / self.interval_nanos().max(1)) as usize + 1
    }

    /// Timestamp of frame `k`.
    pub fn frame_time(&self, k: usize) -> Timestamp {
        time::from_nanos(time::nanos_since_epoch(&self.start) + self.interval_nanos() * k as i128)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.interval_s > 0.0 && self.interval_s.is_finite()) || self.interval_nanos() < 1 {
            return Err(Error::validation("timewarp.interval_s", "must be positive"));
        }
        if self.start > self.end {
            return Err(Error::validation("timewarp.end", "must not precede start"));
        }
        Ok(())
    }
}

/// Inclusive bounds on the number of captured frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameBudget {
    pub min_frames: usize,
    pub max_frames: usize,
}

impl Default for FrameBudget {
    fn default() -> Self {
        FrameBudget {
            min_frames: 120,
            max_frames: 600,
        }
    }
}

impl FrameBudget {
    pub fn admits(&self, frames: usize) -> bool {
        frames >= self.min_frames && frames <= self.max_frames
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootingParameters {
    pub viewfinder: ViewfinderParams,
    pub path: CameraPath,
    pub timewarp: TimeWarpParams,
}

impl ShootingParameters {
    pub fn new(viewfinder: ViewfinderParams, path: CameraPath, timewarp: TimeWarpParams) -> Self {
        ShootingParameters {
            viewfinder,
            path: CameraPath {
                base: viewfinder,
                ..path
            },
            timewarp,
        }
    }

    /// Checks every invariant that does not depend on a frame budget.
    pub fn validate(&self, scene: &SceneDescription) -> Result<()> {
        validate_viewfinder(&self.viewfinder, scene)?;
        if self.path.base != self.viewfinder {
            return Err(Error::validation("path.base", "must equal the viewfinder parameters"));
        }
        validate_path(&self.path, scene)?;
        self.timewarp.validate()
    }

    pub fn validate_with_budget(&self, scene: &SceneDescription, budget: &FrameBudget) -> Result<()> {
        self.validate(scene)?;
        let frames = self.timewarp.frame_count();
        if !budget.admits(frames) {
            return Err(Error::validation(
                "timewarp",
                format!(
                    "{frames} frames outside the budget [{}, {}]",
                    budget.min_frames, budget.max_frames
                ),
            ));
        }
        Ok(())
    }

    /// Pose at the given instant, clamped to the capture window.
    pub fn pose_at_time(&self, scene: &SceneDescription, t: &Timestamp) -> Result<CameraPose> {
        let tw = &self.timewarp;
        let span = (time::nanos_since_epoch(&tw.end) - time::nanos_since_epoch(&tw.start)) as f64;
        let progress = if span > 0.0 {
            (time::nanos_since_epoch(t) - time::nanos_since_epoch(&tw.start)) as f64 / span
        } else {
            0.0
        };
        self.path.pose_at(scene, progress)
    }
}

pub(crate) fn validate_viewfinder(vf: &ViewfinderParams, scene: &SceneDescription) -> Result<()> {
    if vf.location.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("location", "must be finite"));
    }
    if !is_reachable(&scene.reachable, vf.location) {
        return Err(Error::validation("location", "not inside the reachable region"));
    }
    if !vf.yaw_deg.is_finite() {
        return Err(Error::validation("yaw_deg", "must be finite"));
    }
    if !(-89.0..=89.0).contains(&vf.pitch_deg) {
        return Err(Error::validation("pitch_deg", "must lie in [-89, 89]"));
    }
    Ok(())
}

pub(crate) fn validate_path(path: &CameraPath, scene: &SceneDescription) -> Result<()> {
    if !(path.amplitude >= 0.0 && path.amplitude.is_finite()) {
        return Err(Error::validation("path.amplitude", "must be non-negative"));
    }
    match (path.mode, path.amplitude == 0.0) {
        (PathMode::Static, false) => {
            return Err(Error::validation("path.amplitude", "static paths have zero amplitude"))
        }
        (PathMode::Pan | PathMode::Truck | PathMode::Orbit, true) => {
            return Err(Error::validation("path.amplitude", "moving paths need a positive amplitude"))
        }
        _ => {}
    }
    for pose in path.sample(scene, PATH_CHECK_SAMPLES)? {
        if !is_reachable(&scene.reachable, pose.position) {
            return Err(Error::validation("path", "camera leaves the reachable region"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::load_scene;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn scene() -> SceneDescription {
        load_scene(
            r#"{
            "name": "p",
            "georef": {"lat0": 40, "lon0": 0, "alt0": 0, "heading_deg": 0},
            "ground": {"flat": {"albedo": [0.5,0.5,0.5], "half_extent": 200}},
            "solids": [{"center": [0,0,10], "size": [5,5,20], "albedo": [0.8,0.8,0.8], "landmark": 1.0}],
            "reachable": {"rects": [{"x_min": -100, "x_max": 100, "y_min": -100, "y_max": 100}], "height_range": [1, 20]}
        }"#,
        )
        .unwrap()
    }

    fn window(start_h: u32, end_h: u32, interval_s: f64) -> TimeWarpParams {
        TimeWarpParams {
            start: Utc.with_ymd_and_hms(2024, 6, 21, start_h, 0, 0).unwrap(),
            end: Utc.with_ymd_and_hms(2024, 6, 21, end_h, 0, 0).unwrap(),
            interval_s,
        }
    }

    #[test]
    fn two_hour_window_at_thirty_seconds_is_241_frames() {
        assert_eq!(window(6, 8, 30.0).frame_count(), 241);
        assert!(FrameBudget::default().admits(241));
        // 1 h at 60 s falls short of the default budget
        assert_eq!(window(6, 7, 60.0).frame_count(), 61);
        assert!(!FrameBudget::default().admits(61));
        assert_eq!(window(6, 6, 30.0).frame_count(), 1);
    }

    proptest! {
        #[test]
        fn frame_count_matches_floor_formula(span_s in 0i64..200_000, interval in 1u32..5000) {
            let start = Utc.with_ymd_and_hms(2024, 3, 1, 0, 0, 0).unwrap();
            let tw = TimeWarpParams {
                start,
                end: start + chrono::Duration::seconds(span_s),
                interval_s: f64::from(interval),
            };
            prop_assert_eq!(tw.frame_count() as i64, span_s / i64::from(interval) + 1);
        }
    }

    #[test]
    fn path_progress_half_is_base_pose() {
        let s = scene();
        let base = ViewfinderParams {
            location: [50.0, 20.0, 5.0],
            yaw_deg: 160.0,
            pitch_deg: -3.0,
        };
        for (mode, amp) in [
            (PathMode::Static, 0.0),
            (PathMode::Pan, 40.0),
            (PathMode::Truck, 20.0),
            (PathMode::Orbit, 30.0),
        ] {
            let p = CameraPath { mode, amplitude: amp, base }.pose_at(&s, 0.5).unwrap();
            assert!((p.position[0] - 50.0).abs() < 1e-9 && (p.position[1] - 20.0).abs() < 1e-9);
            assert!((p.yaw_deg - 160.0).abs() < 1e-9);
        }
    }

    #[test]
    fn orbit_keeps_distance_to_pivot() {
        let s = scene();
        let base = ViewfinderParams {
            location: [60.0, 0.0, 5.0],
            yaw_deg: 180.0,
            pitch_deg: 0.0,
        };
        let path = CameraPath {
            mode: PathMode::Orbit,
            amplitude: 90.0,
            base,
        };
        for pose in path.sample(&s, 9).unwrap() {
            let r = (pose.position[0].powi(2) + pose.position[1].powi(2)).sqrt();
            assert!((r - 60.0).abs() < 1e-9);
            // still aimed at the pivot
            let bearing = (-pose.position[1]).atan2(-pose.position[0]).to_degrees();
            let diff = (pose.yaw_deg - bearing).rem_euclid(360.0);
            assert!(diff < 1e-6 || diff > 360.0 - 1e-6);
        }
    }

    #[test]
    fn truck_moves_along_right_vector() {
        let s = scene();
        let base = ViewfinderParams {
            location: [0.0, 50.0, 5.0],
            yaw_deg: 90.0,
            pitch_deg: 0.0,
        };
        let path = CameraPath {
            mode: PathMode::Truck,
            amplitude: 20.0,
            base,
        };
        // looking +y, right is +x
        let end = path.pose_at(&s, 1.0).unwrap();
        assert!((end.position[0] - 10.0).abs() < 1e-9);
        assert!((end.position[1] - 50.0).abs() < 1e-9);
    }

    #[test]
    fn validation_names_fields() {
        let s = scene();
        let vf = ViewfinderParams {
            location: [500.0, 0.0, 5.0],
            yaw_deg: 0.0,
            pitch_deg: 0.0,
        };
        let p = ShootingParameters::new(vf, CameraPath::fixed(vf), window(6, 8, 30.0));
        assert_eq!(p.validate(&s).unwrap_err().field(), Some("location"));

        let vf = ViewfinderParams {
            location: [50.0, 0.0, 5.0],
            ..vf
        };
        let mut p = ShootingParameters::new(vf, CameraPath::fixed(vf), window(6, 8, 30.0));
        p.validate(&s).unwrap();
        p.path.amplitude = 3.0;
        assert_eq!(p.validate(&s).unwrap_err().field(), Some("path.amplitude"));
        p.path.amplitude = 0.0;
        p.path.base.yaw_deg = 1.0;
        assert_eq!(p.validate(&s).unwrap_err().field(), Some("path.base"));

        let mut p = ShootingParameters::new(vf, CameraPath::fixed(vf), window(8, 6, 30.0));
        assert_eq!(p.validate(&s).unwrap_err().field(), Some("timewarp.end"));
        p.timewarp = window(6, 7, 60.0);
        let err = p.validate_with_budget(&s, &FrameBudget::default()).unwrap_err();
        assert_eq!(err.field(), Some("timewarp"));

        // a long truck leaves the region
        let p = ShootingParameters::new(
            vf,
            CameraPath {
                mode: PathMode::Truck,
                amplitude: 400.0,
                base: vf,
            },
            window(6, 8, 30.0),
        );
        assert_eq!(p.validate(&s).unwrap_err().field(), Some("path"));
    }
}
