//! Command-line and HTTP front ends over the whole pipeline.

mod cli;
mod http;

pub use cli::cli_main;
pub use http::{router, serve, Job, JobKind, JobState, Session, SharedSession, TimelapseRequest};

use std::path::Path;

use crate::error::{Error, Result};
use crate::optimize::{CameraPath, SearchSpace, ShootingParameters, ViewfinderParams};
use crate::scene::{load_scene_file, SceneDescription};

/// Copy of the scene written next to rendered frames, so a frame directory
/// can be assessed on its own.
pub const SCENE_FILE: &str = "scene.json";

const DEFAULT_SPACE: &str = include_str!("../../data/spaces/default.json");

/// The search space used when none is given.
pub fn default_space() -> SearchSpace {
    serde_json::from_str(DEFAULT_SPACE).expect("built-in search space parses")
}

pub fn load_space_file(path: impl AsRef<Path>) -> Result<SearchSpace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let space: SearchSpace =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    space.validate()?;
    Ok(space)
}

pub fn load_params_file(path: impl AsRef<Path>, scene: &SceneDescription) -> Result<ShootingParameters> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let params = parse_params(&text)?;
    params.validate(scene)?;
    Ok(params)
}

pub fn parse_params(text: &str) -> Result<ShootingParameters> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn params_json(params: &ShootingParameters) -> String {
    serde_json::to_string_pretty(params).expect("params serialize") + "\n"
}

/// Starting point for a new session: a static shot from the middle of the
/// first reachable rect, at the lowest allowed height, facing the primary
/// landmark, over a two-hour window from 17:00 local solar time.
pub fn default_params(scene: &SceneDescription, space: &SearchSpace) -> Result<ShootingParameters> {
    let rect = scene
        .reachable
        .rects
        .first()
        .ok_or_else(|| Error::validation("reachable.rects", "must not be empty"))?;
    let [x, y] = rect.center();
    let z = scene.reachable.height_range[0];
    let yaw_deg = scene.primary_landmark().map_or(0.0, |l| {
        (l.center[1] - y).atan2(l.center[0] - x).to_degrees().rem_euclid(360.0)
    });
    let vf = ViewfinderParams {
        location: [x, y, z],
        yaw_deg,
        pitch_deg: 0.0,
    };
    let params = ShootingParameters::new(vf, CameraPath::fixed(vf), space.window(&scene.georef, 17.0, 2.0, 30.0));
    params.validate(scene)?;
    Ok(params)
}

pub(crate) fn load_scene_or_sibling(scene: Option<&Path>, frames_dir: &Path) -> Result<SceneDescription> {
    match scene {
        Some(p) => load_scene_file(p),
        None => load_scene_file(frames_dir.join(SCENE_FILE)),
    }
}
