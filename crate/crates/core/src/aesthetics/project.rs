use serde::{Deserialize, Serialize};

use crate::render::CameraPose;
use crate::scene::SceneDescription;

/// A landmark's normalized image position (origin top-left, x right, y down).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SalientPoint {
    pub xy: [f64; 2],
    pub weight: f64,
}

/// Pinhole projection of a world point into normalized image coordinates.
/// `None` when the point is on or behind the image plane.
pub fn project_point(pose: &CameraPose, point: [f64; 3], aspect: f64) -> Option<[f64; 2]> {
    let (sy, cy) = pose.yaw_deg.to_radians().sin_cos();
    let (sp, cp) = pose.pitch_deg.to_radians().sin_cos();
    let forward = [cp * cy, cp * sy, sp];
    let right = [sy, -cy, 0.0];
    let up = [-cy * sp, -sy * sp, cp];
    let d = [
        point[0] - pose.position[0],
        point[1] - pose.position[1],
        point[2] - pose.position[2],
    ];
    let dot = |a: [f64; 3]| a[0] * d[0] + a[1] * d[1] + a[2] * d[2];
    let depth = dot(forward);
    if depth <= 0.0 {
        return None;
    }
    let tan_half = (pose.vfov_deg.to_radians() / 2.0).tan();
    let x = dot(right) / (depth * tan_half * aspect);
    let y = dot(up) / (depth * tan_half);
    Some([0.5 + x / 2.0, 0.5 - y / 2.0])
}

/// Landmarks visible in the frame, in scene order.
pub fn project_landmarks(scene: &SceneDescription, pose: &CameraPose, aspect: f64) -> Vec<SalientPoint> {
    scene
        .landmarks()
        .filter_map(|l| {
            let xy = project_point(pose, l.center, aspect)?;
            let inside = (0.0..=1.0).contains(&xy[0]) && (0.0..=1.0).contains(&xy[1]);
            inside.then_some(SalientPoint { xy, weight: l.weight })
        })
        .collect()
}
