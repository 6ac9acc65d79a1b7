//! Compiles shooting parameters into a plan for a camera robot: GPS
//! waypoints with gimbal angles plus the capture schedule.
//!
//! Conventions: the local frame's +x axis points along the georeference
//! heading (compass bearing), +y is 90 degrees counterclockwise from +x
//! seen from above, z is up. Gimbal yaw is a compass bearing (0 = North,
//! clockwise); gimbal pitch is positive down.

mod format;

pub use format::{deserialize_plan, serialize_plan};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::ShootingParameters;
use crate::render::DEFAULT_FPS;
use crate::scene::{GeoReference, SceneDescription};
use crate::time::{self, Timestamp};

/// Meters per degree of latitude (and of longitude at the equator).
pub const METERS_PER_DEGREE: f64 = 111_320.0;
/// Largest local offset the tangent-plane approximation accepts.
pub const MAX_LOCAL_DISTANCE_M: f64 = 50_000.0;
const MAX_ABS_LAT0: f64 = 89.0;
pub const DEFAULT_WAYPOINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpsPoint {
    pub lat: f64,
    pub lon: f64,
    pub alt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    #[serde(with = "time::iso")]
    pub time: Timestamp,
    pub lat: f64,
    pub lon: f64,
    pub alt_m: f64,
    pub gimbal_pitch_deg: f64,
    pub gimbal_yaw_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptureSchedule {
    #[serde(with = "time::iso")]
    pub start: Timestamp,
    #[serde(with = "time::iso")]
    pub end: Timestamp,
    pub interval_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotPlan {
    pub georef: GeoReference,
    pub waypoints: Vec<Waypoint>,
    pub capture: CaptureSchedule,
    pub playback_fps: f64,
}

impl RobotPlan {
    pub fn validate(&self) -> Result<()> {
        let c = &self.capture;
        if c.start > c.end {
            return Err(Error::validation("capture.end", "must not precede start"));
        }
        if !(c.interval_s > 0.0 && c.interval_s.is_finite()) {
            return Err(Error::validation("capture.interval_s", "must be positive"));
        }
        if !(self.playback_fps > 0.0 && self.playback_fps.is_finite()) {
            return Err(Error::validation("playback_fps", "must be positive"));
        }
        if self.waypoints.len() < 2 {
            return Err(Error::validation("waypoints", "need at least two waypoints"));
        }
        for (i, w) in self.waypoints.iter().enumerate() {
            if !(0.0..360.0).contains(&w.gimbal_yaw_deg) {
                return Err(Error::validation(format!("waypoints[{i}].gimbal_yaw_deg"), "must lie in [0, 360)"));
            }
            if !(-90.0..=90.0).contains(&w.gimbal_pitch_deg) {
                return Err(Error::validation(format!("waypoints[{i}].gimbal_pitch_deg"), "must lie in [-90, 90]"));
            }
            if !(-90.0..=90.0).contains(&w.lat) || !w.lon.is_finite() || !w.alt_m.is_finite() {
                return Err(Error::validation(format!("waypoints[{i}]"), "coordinates out of range"));
            }
        }
        for (i, pair) in self.waypoints.windows(2).enumerate() {
            if pair[1].time < pair[0].time {
                return Err(Error::validation(format!("waypoints[{}].time", i + 1), "times must not decrease"));
            }
        }
        let (first, last) = (&self.waypoints[0], &self.waypoints[self.waypoints.len() - 1]);
        if first.time != c.start || last.time != c.end {
            return Err(Error::validation("waypoints", "must span the capture window"));
        }
        Ok(())
    }
}

fn check_georef(georef: &GeoReference) -> Result<()> {
    if !(georef.lat0.abs() < MAX_ABS_LAT0) {
        return Err(Error::validation("georef.lat0", "must lie strictly within (-89, 89)"));
    }
    if !georef.lon0.is_finite() || !georef.alt0.is_finite() || !georef.heading_deg.is_finite() {
        return Err(Error::validation("georef", "must be finite"));
    }
    Ok(())
}

/// Local scene coordinates to latitude, longitude and altitude.
pub fn local_to_gps(georef: &GeoReference, p: [f64; 3]) -> Result<GpsPoint> {
    check_georef(georef)?;
    if !(p[0].hypot(p[1]).hypot(p[2]) < MAX_LOCAL_DISTANCE_M) {
        return Err(Error::validation("position", "outside the 50 km tangent-plane range"));
    }
    let (s, c) = georef.heading_deg.to_radians().sin_cos();
    let north = p[0] * c + p[1] * s;
    let east = p[0] * s - p[1] * c;
    Ok(GpsPoint {
        lat: georef.lat0 + north / METERS_PER_DEGREE,
        lon: georef.lon0 + east / (METERS_PER_DEGREE * georef.lat0.to_radians().cos()),
        alt: georef.alt0 + p[2],
    })
}

/// Inverse of [`local_to_gps`].
pub fn gps_to_local(georef: &GeoReference, lat: f64, lon: f64, alt: f64) -> Result<[f64; 3]> {
    check_georef(georef)?;
    let north = (lat - georef.lat0) * METERS_PER_DEGREE;
    let east = (lon - georef.lon0) * METERS_PER_DEGREE * georef.lat0.to_radians().cos();
    let (s, c) = georef.heading_deg.to_radians().sin_cos();
    Ok([north * c + east * s, north * s - east * c, alt - georef.alt0])
}

/// Compass bearing of a camera with the given scene yaw, in [0, 360).
pub fn gimbal_yaw(heading_deg: f64, yaw_deg: f64) -> f64 {
    let y = (heading_deg - yaw_deg).rem_euclid(360.0);
    if y >= 360.0 {
        0.0
    } else {
        y
    }
}

/// Gimbal pitch, positive down.
pub fn gimbal_pitch(pitch_deg: f64) -> f64 {
    -pitch_deg
}

/// Samples the camera path at `waypoint_count` times spread exactly
/// uniformly over the capture window.
pub fn compile_plan(
    scene: &SceneDescription,
    params: &ShootingParameters,
    georef: &GeoReference,
    waypoint_count: usize,
) -> Result<RobotPlan> {
    if waypoint_count < 2 {
        return Err(Error::validation("waypoint_count", "must be at least 2"));
    }
    params.validate(scene)?;
    check_georef(georef)?;
    let tw = &params.timewarp;
    let last = (waypoint_count - 1) as u64;
    let waypoints = (0..waypoint_count as u64)
        .map(|k| {
            let pose = params.path.pose_at(scene, k as f64 / last as f64)?;
            let gps = local_to_gps(georef, pose.position)?;
            Ok(Waypoint {
                time: time::lerp_time(&tw.start, &tw.end, k, last),
                lat: gps.lat,
                lon: gps.lon,
                alt_m: gps.alt,
                gimbal_pitch_deg: gimbal_pitch(pose.pitch_deg),
                gimbal_yaw_deg: gimbal_yaw(georef.heading_deg, pose.yaw_deg),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = RobotPlan {
        georef: *georef,
        waypoints,
        capture: CaptureSchedule {
            start: tw.start,
            end: tw.end,
            interval_s: tw.interval_s,
        },
        playback_fps: DEFAULT_FPS,
    };
    plan.validate()?;
    Ok(plan)
}
