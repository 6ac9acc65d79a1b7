//! Candidate sets for the staged search and the probe renders used to score
//! them.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::params::{FrameBudget, PathMode, TimeWarpParams, ViewfinderParams};
use crate::error::{Error, Result};
use crate::render::{ExposureMode, RenderSettings};
use crate::scene::{is_reachable, sun_state, GeoReference, SceneDescription};
use crate::time::{self, Timestamp};

/// Grid resolution over the reachable bounding box and height range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

/// Amplitude levels per moving mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitudes {
    pub pan: Vec<f64>,
    pub truck: Vec<f64>,
    pub orbit: Vec<f64>,
}

impl Amplitudes {
    /// Candidate amplitudes for `mode`; static has the single level 0.
    pub fn levels(&self, mode: PathMode) -> &[f64] {
        match mode {
            PathMode::Static => &[0.0],
            PathMode::Pan => &self.pan,
            PathMode::Truck => &self.truck,
            PathMode::Orbit => &self.orbit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSettings {
    pub width: u32,
    pub height: u32,
    /// Number of probe instants spread over the daylight span.
    pub timestamps: usize,
    /// Frames rendered when a whole sequence is probed; longer sequences are
    /// subsampled evenly.
    pub sequence_frames: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            width: 96,
            height: 54,
            timestamps: 3,
            sequence_frames: 24,
        }
    }
}

impl ProbeSettings {
    /// Jitter-free render settings at probe resolution.
    pub fn render_settings(&self) -> RenderSettings {
        RenderSettings {
            width: self.width,
            height: self.height,
            exposure_mode: ExposureMode::Auto { jitter_sigma: 0.0 },
            shadows: true,
            seed: 0,
        }
    }
}

/// Every candidate the optimizer may pick.
///
/// Start hours are local mean solar time (UTC plus longitude / 15) on
/// `date`, so one space file suits scenes at any longitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub date: NaiveDate,
    pub grid: GridSize,
    pub yaw_deg: Vec<f64>,
    pub pitch_deg: Vec<f64>,
    pub modes: Vec<PathMode>,
    pub amplitudes: Amplitudes,
    pub start_hours: Vec<f64>,
    pub durations_h: Vec<f64>,
    pub intervals_s: Vec<f64>,
    #[serde(default)]
    pub budget: FrameBudget,
    #[serde(default)]
    pub probe: ProbeSettings,
}

fn non_empty<T>(field: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::validation(field, "must not be empty"));
    }
    Ok(())
}

fn all_finite(field: &str, v: &[f64], positive: bool) -> Result<()> {
    non_empty(field, v)?;
    if v.iter().any(|x| !x.is_finite() || (positive && *x <= 0.0)) {
        let what = if positive { "positive" } else { "finite" };
        return Err(Error::validation(field, format!("entries must be {what}")));
    }
    Ok(())
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        let g = self.grid;
        if g.nx == 0 || g.ny == 0 || g.nz == 0 {
            return Err(Error::validation("grid", "resolutions must be at least 1"));
        }
        all_finite("yaw_deg", &self.yaw_deg, false)?;
        all_finite("pitch_deg", &self.pitch_deg, false)?;
        if self.pitch_deg.iter().any(|p| p.abs() > 89.0) {
            return Err(Error::validation("pitch_deg", "entries must lie in [-89, 89]"));
        }
        non_empty("modes", &self.modes)?;
        for mode in &self.modes {
            let (field, levels) = match mode {
                PathMode::Static => continue,
                PathMode::Pan => ("amplitudes.pan", &self.amplitudes.pan),
                PathMode::Truck => ("amplitudes.truck", &self.amplitudes.truck),
                PathMode::Orbit => ("amplitudes.orbit", &self.amplitudes.orbit),
            };
            all_finite(field, levels, true)?;
        }
        all_finite("start_hours", &self.start_hours, false)?;
        all_finite("durations_h", &self.durations_h, false)?;
        if self.durations_h.iter().any(|d| *d < 0.0) {
            return Err(Error::validation("durations_h", "entries must be non-negative"));
        }
        all_finite("intervals_s", &self.intervals_s, true)?;
        if self.budget.min_frames > self.budget.max_frames {
            return Err(Error::validation("budget", "min_frames exceeds max_frames"));
        }
        let p = self.probe;
        if p.width < 16 || p.height < 16 {
            return Err(Error::validation("probe", "resolution must be at least 16x16"));
        }
        if p.timestamps == 0 {
            return Err(Error::validation("probe.timestamps", "must be at least 1"));
        }
        if p.sequence_frames < 5 {
            return Err(Error::validation("probe.sequence_frames", "must be at least 5"));
        }
        Ok(())
    }

    /// Every grid location in flat order (x-major, then y, then z), with
    /// `None` for points outside the reachable region.
    pub fn grid_locations(&self, scene: &SceneDescription) -> Vec<Option<[f64; 3]>> {
        let bb = scene.reachable.bounding_rect();
        let [z0, z1] = scene.reachable.height_range;
        let g = self.grid;
        let cell = |lo: f64, hi: f64, i: usize, n: usize| lo + (i as f64 + 0.5) * (hi - lo) / n as f64;
        let mut out = Vec::with_capacity(g.nx * g.ny * g.nz);
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                for iz in 0..g.nz {
                    let p = [
                        cell(bb.x_min, bb.x_max, ix, g.nx),
                        cell(bb.y_min, bb.y_max, iy, g.ny),
                        cell(z0, z1, iz, g.nz),
                    ];
                    out.push(is_reachable(&scene.reachable, p).then_some(p));
                }
            }
        }
        out
    }

    /// Viewfinder candidates in flat order with their flat indices; indices
    /// of unreachable grid points are skipped, not renumbered.
    pub fn viewfinder_candidates(&self, scene: &SceneDescription) -> Vec<(usize, ViewfinderParams)> {
        let per_location = self.yaw_deg.len() * self.pitch_deg.len();
        let mut out = Vec::new();
        for (li, loc) in self.grid_locations(scene).into_iter().enumerate() {
            let Some(location) = loc else { continue };
            for (yi, &yaw_deg) in self.yaw_deg.iter().enumerate() {
                for (pi, &pitch_deg) in self.pitch_deg.iter().enumerate() {
                    out.push((
                        li * per_location + yi * self.pitch_deg.len() + pi,
                        ViewfinderParams {
                            location,
                            yaw_deg,
                            pitch_deg,
                        },
                    ));
                }
            }
        }
        out
    }

    /// `(mode, amplitude)` pairs in flat order: modes as listed, then levels.
    pub fn path_candidates(&self) -> Vec<(PathMode, f64)> {
        self.modes
            .iter()
            .flat_map(|&m| self.amplitudes.levels(m).iter().map(move |&a| (m, a)))
            .collect()
    }

    /// Capture window starting at local solar hour `start_hour`.
    pub fn window(&self, georef: &GeoReference, start_hour: f64, duration_h: f64, interval_s: f64) -> TimeWarpParams {
        let midnight = self.date.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc();
        let utc_hours = start_hour - georef.lon0 / 15.0;
        let start = midnight + chrono::Duration::seconds((utc_hours * 3600.0).round() as i64);
        let end = start + chrono::Duration::seconds((duration_h * 3600.0).round() as i64);
        TimeWarpParams { start, end, interval_s }
    }

    /// Every start × duration × interval window in flat order, budget or not.
    pub fn timewarp_candidates(&self, georef: &GeoReference) -> Vec<TimeWarpParams> {
        let mut out = Vec::new();
        for &s in &self.start_hours {
            for &d in &self.durations_h {
                for &i in &self.intervals_s {
                    out.push(self.window(georef, s, d, i));
                }
            }
        }
        out
    }

    /// Number of candidates in each stage before feasibility filtering.
    pub fn stage_sizes(&self) -> [usize; 3] {
        let g = self.grid;
        [
            g.nx * g.ny * g.nz * self.yaw_deg.len() * self.pitch_deg.len(),
            self.path_candidates().len(),
            self.start_hours.len() * self.durations_h.len() * self.intervals_s.len(),
        ]
    }
}

/// Sunrise and sunset around the solar noon of `date`, found by a one-minute
/// scan. `None` when the sun never rises.
pub fn daylight_span(georef: &GeoReference, date: NaiveDate) -> Option<(Timestamp, Timestamp)> {
    let midnight = date.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc();
    let minute = |m: i64| midnight + chrono::Duration::minutes(m);
    let noon_guess = (720.0 - georef.lon0 * 4.0).round() as i64;
    let elevation = |m: i64| sun_state(georef, &minute(m)).elevation_deg;
    let noon = (noon_guess - 60..=noon_guess + 60)
        .max_by(|a, b| elevation(*a).total_cmp(&elevation(*b)))
        .expect("non-empty range");
    if elevation(noon) < 0.0 {
        return None;
    }
    let mut rise = noon;
    while rise > noon - 720 && elevation(rise - 1) >= 0.0 {
        rise -= 1;
    }
    let mut set = noon;
    while set < noon + 720 && elevation(set + 1) >= 0.0 {
        set += 1;
    }
    Some((minute(rise), minute(set)))
}

/// Probe instants at `(i + 1) / (count + 1)` of the daylight span; the whole
/// UTC day when the sun never rises.
pub fn probe_times(georef: &GeoReference, date: NaiveDate, count: usize) -> Vec<Timestamp> {
    let (a, b) = daylight_span(georef, date).unwrap_or_else(|| {
        let midnight = date.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc();
        (midnight, midnight + chrono::Duration::days(1))
    });
    (1..=count as u64)
        .map(|i| time::lerp_time(&a, &b, i, count as u64 + 1))
        .collect()
}
