//! The simulated world: geometry, geo-reference, reachable shooting region,
//! sun position and deterministic foot/vehicle traffic.
//!
//! A [`SceneDescription`] is loaded from a JSON document and validated once;
//! afterwards it is immutable and every query on it is a pure function.

mod agents;
mod region;
mod sun;
pub mod synth;

pub use agents::{agent_positions, AgentPlacement};
pub use region::is_reachable;
pub use sun::{declination_deg, equation_of_time_min, solar_hour, sun_state, SunState};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rgb = [f64; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDescription {
    pub name: String,
    pub georef: GeoReference,
    pub ground: Ground,
    #[serde(default)]
    pub solids: Vec<Solid>,
    pub reachable: ReachableRegion,
    #[serde(default)]
    pub agents: Vec<AgentRoute>,
    #[serde(default)]
    pub sky: SkyParams,
}

/// Anchors the local scene frame (x, y horizontal, z up, meters) on the globe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoReference {
    pub lat0: f64,
    pub lon0: f64,
    pub alt0: f64,
    /// Compass bearing of the local +x axis; 0 = North, clockwise positive.
    pub heading_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Ground {
    /// Plane at z = 0 covering `[-half_extent, half_extent]²`.
    Flat { albedo: Rgb, half_extent: f64 },
    /// Elevation grid centered on the origin. `elevations[r][c]` sits at
    /// `x = x_min + c * cell_size`, `y = y_min + r * cell_size`.
    Heightfield {
        cell_size: f64,
        elevations: Vec<Vec<f64>>,
        albedo: Rgb,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solid {
    pub center: [f64; 3],
    pub size: [f64; 3],
    pub albedo: Rgb,
    /// Saliency weight in (0, 1]; present only for landmarks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landmark: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    pub fn center(&self) -> [f64; 2] {
        [(self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0]
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0) * (self.y_max - self.y_min).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachableRegion {
    pub rects: Vec<Rect>,
    /// Closed `[min_m, max_m]` range of camera heights (scene z).
    pub height_range: [f64; 2],
}

impl ReachableRegion {
    /// Axis-aligned bounding rectangle of all rects.
    pub fn bounding_rect(&self) -> Rect {
        self.rects.iter().fold(
            Rect {
                x_min: f64::INFINITY,
                x_max: f64::NEG_INFINITY,
                y_min: f64::INFINITY,
                y_max: f64::NEG_INFINITY,
            },
            |acc, r| Rect {
                x_min: acc.x_min.min(r.x_min),
                x_max: acc.x_max.max(r.x_max),
                y_min: acc.y_min.min(r.y_min),
                y_max: acc.y_max.max(r.y_max),
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Person,
    Vehicle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRoute {
    pub kind: AgentKind,
    pub polyline: Vec<[f64; 2]>,
    /// Meters per second.
    pub speed: f64,
    pub count: u32,
    /// Fraction of the route length over which agents are spread.
    pub phase_spread: f64,
}

impl AgentRoute {
    pub fn length(&self) -> f64 {
        self.polyline
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkyParams {
    pub day_zenith: Rgb,
    pub night_zenith: Rgb,
    /// Horizon haze in [0, 1]; also drives distance fog.
    pub haze: f64,
}

impl Default for SkyParams {
    fn default() -> Self {
        SkyParams {
            day_zenith: [0.22, 0.42, 0.85],
            night_zenith: [0.002, 0.002, 0.006],
            haze: 0.3,
        }
    }
}

/// Horizontal extent of the scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn diagonal(&self) -> f64 {
        ((self.x_max - self.x_min).powi(2) + (self.y_max - self.y_min).powi(2)).sqrt()
    }

    pub fn contains_rect(&self, r: &Rect) -> bool {
        r.x_min >= self.x_min && r.x_max <= self.x_max && r.y_min >= self.y_min && r.y_max <= self.y_max
    }
}

impl Ground {
    pub fn albedo(&self) -> Rgb {
        match self {
            Ground::Flat { albedo, .. } | Ground::Heightfield { albedo, .. } => *albedo,
        }
    }

    pub fn bounds(&self) -> Bounds {
        match self {
            Ground::Flat { half_extent, .. } => Bounds {
                x_min: -half_extent,
                x_max: *half_extent,
                y_min: -half_extent,
                y_max: *half_extent,
            },
            Ground::Heightfield {
                cell_size,
                elevations,
                ..
            } => {
                let rows = elevations.len();
                let cols = elevations.first().map_or(0, Vec::len);
                let hw = (cols.saturating_sub(1)) as f64 * cell_size / 2.0;
                let hh = (rows.saturating_sub(1)) as f64 * cell_size / 2.0;
                Bounds {
                    x_min: -hw,
                    x_max: hw,
                    y_min: -hh,
                    y_max: hh,
                }
            }
        }
    }

    /// Ground elevation at (x, y). Heightfields are bilinear inside the grid
    /// and clamp to the edge values outside.
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        match self {
            Ground::Flat { .. } => 0.0,
            Ground::Heightfield {
                cell_size,
                elevations,
                ..
            } => {
                let b = self.bounds();
                let rows = elevations.len();
                let cols = elevations[0].len();
                let fc = ((x - b.x_min) / cell_size).clamp(0.0, (cols - 1) as f64);
                let fr = ((y - b.y_min) / cell_size).clamp(0.0, (rows - 1) as f64);
                let c0 = (fc.floor() as usize).min(cols - 2);
                let r0 = (fr.floor() as usize).min(rows - 2);
                let tx = fc - c0 as f64;
                let ty = fr - r0 as f64;
                let e = |r: usize, c: usize| elevations[r][c];
                let top = e(r0, c0) * (1.0 - tx) + e(r0, c0 + 1) * tx;
                let bottom = e(r0 + 1, c0) * (1.0 - tx) + e(r0 + 1, c0 + 1) * tx;
                top * (1.0 - ty) + bottom * ty
            }
        }
    }
}

/// A landmark solid: its center and saliency weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub center: [f64; 3],
    pub weight: f64,
}

impl SceneDescription {
    pub fn bounds(&self) -> Bounds {
        self.ground.bounds()
    }

    pub fn diagonal(&self) -> f64 {
        self.bounds().diagonal()
    }

    pub fn landmarks(&self) -> impl Iterator<Item = Landmark> + '_ {
        self.solids.iter().filter_map(|s| {
            s.landmark.map(|weight| Landmark {
                center: s.center,
                weight,
            })
        })
    }

    /// Highest-weight landmark; the first one wins ties.
    pub fn primary_landmark(&self) -> Option<Landmark> {
        self.landmarks().fold(None, |best: Option<Landmark>, l| match best {
            Some(b) if b.weight >= l.weight => Some(b),
            _ => Some(l),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.georef;
        check_range("georef.lat0", g.lat0, -90.0, 90.0)?;
        check_range("georef.lon0", g.lon0, -180.0, 180.0)?;
        check_finite("georef.alt0", g.alt0)?;
        if !(g.heading_deg >= 0.0 && g.heading_deg < 360.0) {
            return Err(Error::validation("georef.heading_deg", "must lie in [0, 360)"));
        }

        match &self.ground {
            Ground::Flat {
                albedo,
                half_extent,
            } => {
                check_rgb("ground.flat.albedo", albedo)?;
                if !(*half_extent > 0.0 && half_extent.is_finite()) {
                    return Err(Error::validation("ground.flat.half_extent", "must be positive"));
                }
            }
            Ground::Heightfield {
                cell_size,
                elevations,
                albedo,
            } => {
                check_rgb("ground.heightfield.albedo", albedo)?;
                if !(*cell_size > 0.0 && cell_size.is_finite()) {
                    return Err(Error::validation("ground.heightfield.cell_size", "must be positive"));
                }
                let cols = elevations.first().map_or(0, Vec::len);
                if elevations.len() < 2 || cols < 2 {
                    return Err(Error::validation(
                        "ground.heightfield.elevations",
                        "grid must be at least 2x2",
                    ));
                }
                if elevations.iter().any(|row| row.len() != cols) {
                    return Err(Error::validation(
                        "ground.heightfield.elevations",
                        "rows must all have the same length",
                    ));
                }
                if elevations.iter().flatten().any(|e| !e.is_finite()) {
                    return Err(Error::validation(
                        "ground.heightfield.elevations",
                        "elevations must be finite",
                    ));
                }
            }
        }

        for (i, s) in self.solids.iter().enumerate() {
            for k in 0..3 {
                check_finite(&format!("solids[{i}].center"), s.center[k])?;
                if !(s.size[k] > 0.0 && s.size[k].is_finite()) {
                    return Err(Error::validation(
                        format!("solids[{i}].size"),
                        "extents must be positive",
                    ));
                }
            }
            check_rgb(&format!("solids[{i}].albedo"), &s.albedo)?;
            if let Some(w) = s.landmark {
                if !(w > 0.0 && w <= 1.0) {
                    return Err(Error::validation(
                        format!("solids[{i}].landmark"),
                        "saliency weight must lie in (0, 1]",
                    ));
                }
            }
        }

        let r = &self.reachable;
        let [hmin, hmax] = r.height_range;
        check_finite("reachable.height_range", hmin)?;
        check_finite("reachable.height_range", hmax)?;
        if hmin > hmax {
            return Err(Error::validation("reachable.height_range", "min must not exceed max"));
        }
        if !r.rects.iter().any(|rect| rect.area() > 0.0) {
            return Err(Error::validation(
                "reachable.rects",
                "at least one rectangle with positive area is required",
            ));
        }
        let bounds = self.bounds();
        for (i, rect) in r.rects.iter().enumerate() {
            if rect.x_min > rect.x_max || rect.y_min > rect.y_max {
                return Err(Error::validation(format!("reachable.rects[{i}]"), "min exceeds max"));
            }
            if !bounds.contains_rect(rect) {
                return Err(Error::validation(
                    format!("reachable.rects[{i}]"),
                    "lies outside the scene bounds",
                ));
            }
        }

        for (i, a) in self.agents.iter().enumerate() {
            if a.polyline.len() < 2 {
                return Err(Error::validation(
                    format!("agents[{i}].polyline"),
                    "needs at least two points",
                ));
            }
            if !(a.length() > 0.0) {
                return Err(Error::validation(
                    format!("agents[{i}].polyline"),
                    "route length must be positive",
                ));
            }
            if !(a.speed > 0.0 && a.speed.is_finite()) {
                return Err(Error::validation(format!("agents[{i}].speed"), "must be positive"));
            }
            if a.count == 0 {
                return Err(Error::validation(format!("agents[{i}].count"), "must be positive"));
            }
            check_range(&format!("agents[{i}].phase_spread"), a.phase_spread, 0.0, 1.0)?;
        }

        check_rgb("sky.day_zenith", &self.sky.day_zenith)?;
        check_rgb("sky.night_zenith", &self.sky.night_zenith)?;
        check_range("sky.haze", self.sky.haze, 0.0, 1.0)?;
        Ok(())
    }
}

fn check_finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, "must be finite"))
    }
}

fn check_range(field: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v >= lo && v <= hi {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must lie in [{lo}, {hi}]")))
    }
}

fn check_rgb(field: &str, c: &Rgb) -> Result<()> {
    if c.iter().all(|v| (0.0..=1.0).contains(v)) {
        Ok(())
    } else {
        Err(Error::validation(field, "color components must lie in [0, 1]"))
    }
}

/// Parses and validates a scene document.
pub fn load_scene(source: &str) -> Result<SceneDescription> {
    let scene: SceneDescription =
        serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    scene.validate()?;
    Ok(scene)
}

pub fn load_scene_file(path: impl AsRef<Path>) -> Result<SceneDescription> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_scene(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn serialize_scene(scene: &SceneDescription) -> String {
    serde_json::to_string_pretty(scene).expect("scene serializes")
}
