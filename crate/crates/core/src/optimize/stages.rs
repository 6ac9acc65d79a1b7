//! Exhaustive staged search: viewfinder, then camera path, then time warp.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::{
    validate_path, CameraPath, PathMode, ShootingParameters, TimeWarpParams, ViewfinderParams,
};
use super::space::{probe_times, SearchSpace};
use crate::aesthetics::{
    assess_detailed, sample_indices, score_frame, AestheticModel, HeuristicModel, QualityScore,
};
use crate::error::{Error, Result};
use crate::render::{render_frame, FrameSequence, RenderSettings, DEFAULT_FPS};
use crate::scene::SceneDescription;
use crate::time::Timestamp;

/// Samples along a path for its motion score.
pub const PATH_SCORE_SAMPLES: usize = 16;
/// Weight of the image term inside the path stage score.
pub const PATH_IMAGE_WEIGHT: f64 = 0.25;
const MAX_RANDOM_ATTEMPTS: usize = 1000;
const STAGE_SALTS: [u64; 3] = [0x5EED_0001, 0x5EED_0002, 0x5EED_0003];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Image,
    Video,
    Time,
}

/// Which stages are searched; the others are drawn at random.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stages {
    pub image: bool,
    pub video: bool,
    pub time: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        image: true,
        video: true,
        time: true,
    };
    pub const NONE: Stages = Stages {
        image: false,
        video: false,
        time: false,
    };

    /// Parses letters from `ivt`, e.g. `"iv"`; the empty string is no stage.
    pub fn parse(text: &str) -> Result<Stages> {
        let mut s = Stages::NONE;
        for c in text.chars() {
            match c.to_ascii_lowercase() {
                'i' => s.image = true,
                'v' => s.video = true,
                't' => s.time = true,
                _ => return Err(Error::validation("stages", format!("unknown stage `{c}`, expected i, v or t"))),
            }
        }
        Ok(s)
    }

    pub fn enabled(&self, stage: Stage) -> bool {
        match stage {
            Stage::Image => self.image,
            Stage::Video => self.video,
            Stage::Time => self.time,
        }
    }
}

impl std::fmt::Display for Stages {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut any = false;
        for (on, c) in [(self.image, 'i'), (self.video, 'v'), (self.time, 't')] {
            if on {
                write!(f, "{c}")?;
                any = true;
            }
        }
        if !any {
            write!(f, "-")?;
        }
        Ok(())
    }
}

/// Winner of one exhaustive stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageResult<T> {
    pub best: T,
    pub score: f64,
    /// Flat candidate index of the winner.
    pub index: usize,
    /// Feasible candidates evaluated.
    pub evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    pub searched: bool,
    /// Candidates in the space before feasibility filtering.
    pub candidates: usize,
    pub evaluated: usize,
    pub best_index: Option<usize>,
    pub best_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    /// Always image, video, time in that order.
    pub stages: Vec<StageReport>,
    pub total_evaluations: usize,
    pub wall_time_s: f64,
    pub seed: u64,
    pub params: ShootingParameters,
    pub score: QualityScore,
}

/// Argmax by score; the smallest flat index wins ties.
fn argmax<T: Copy>(
    candidates: impl IntoIterator<Item = (usize, T)>,
    mut score: impl FnMut(&T) -> Result<f64>,
) -> Result<Option<StageResult<T>>> {
    let mut best: Option<StageResult<T>> = None;
    let mut evaluated = 0;
    for (index, c) in candidates {
        let s = score(&c)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|b| s > b.score) {
            best = Some(StageResult {
                best: c,
                score: s,
                index,
                evaluated: 0,
            });
        }
    }
    Ok(best.map(|b| StageResult { evaluated, ..b }))
}

/// Renders an evenly subsampled, jitter-free version of the planned
/// sequence: at most `max_frames` frames, each at its true time and pose.
pub fn probe_sequence(
    scene: &SceneDescription,
    params: &ShootingParameters,
    settings: &RenderSettings,
    max_frames: usize,
) -> Result<FrameSequence> {
    params.validate(scene)?;
    let count = params.timewarp.frame_count();
    let denom = (count.max(2) - 1) as f64;
    let frames = sample_indices(count, max_frames)
        .into_iter()
        .map(|k| {
            let pose = params.path.pose_at(scene, k as f64 / denom)?;
            render_frame(scene, &pose, &params.timewarp.frame_time(k), settings)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameSequence {
        frames,
        params: *params,
        fps_playback: DEFAULT_FPS,
        score: None,
    })
}

/// Scores candidates of each stage against one scene and search space.
pub struct Optimizer<'a> {
    pub scene: &'a SceneDescription,
    pub space: &'a SearchSpace,
    pub model: &'a dyn AestheticModel,
    probe_times: Vec<Timestamp>,
    settings: RenderSettings,
}

impl<'a> Optimizer<'a> {
    pub fn new(scene: &'a SceneDescription, space: &'a SearchSpace, model: &'a dyn AestheticModel) -> Result<Self> {
        space.validate()?;
        if space.budget.min_frames < 5 {
            return Err(Error::validation("budget.min_frames", "must be at least 5"));
        }
        Ok(Optimizer {
            scene,
            space,
            model,
            probe_times: probe_times(&scene.georef, space.date, space.probe.timestamps),
            settings: space.probe.render_settings(),
        })
    }

    pub fn probe_times(&self) -> &[Timestamp] {
        &self.probe_times
    }

    fn q_i_at(&self, path: &CameraPath, progress: f64, t: &Timestamp) -> Result<f64> {
        let pose = path.pose_at(self.scene, progress)?;
        let frame = render_frame(self.scene, &pose, t, &self.settings)?;
        Ok(score_frame(self.model, self.scene, &frame).q_i)
    }

    /// Mean image score of a static shot over the probe instants.
    pub fn viewfinder_score(&self, vf: &ViewfinderParams) -> Result<f64> {
        let path = CameraPath::fixed(*vf);
        let mut total = 0.0;
        for t in &self.probe_times {
            total += self.q_i_at(&path, 0.0, t)?;
        }
        Ok(total / self.probe_times.len() as f64)
    }

    /// Motion score over 16 poses plus a quarter of the mean image score of
    /// the first, middle and last probe frames along the path.
    pub fn path_score(&self, path: &CameraPath) -> Result<f64> {
        let poses = path.sample(self.scene, PATH_SCORE_SAMPLES)?;
        let q_v = self.model.score_video(&poses, self.scene, self.settings.aspect())?.q_v;
        let n = self.probe_times.len();
        let picks = [(0.0, 0), (0.5, n / 2), (1.0, n - 1)];
        let mut image = 0.0;
        for (progress, i) in picks {
            image += self.q_i_at(path, progress, &self.probe_times[i])?;
        }
        Ok(q_v + PATH_IMAGE_WEIGHT * image / 3.0)
    }

    /// Time-lapse score of the probe sequence.
    pub fn timewarp_score(&self, params: &ShootingParameters) -> Result<f64> {
        let seq = probe_sequence(self.scene, params, &self.settings, self.space.probe.sequence_frames)?;
        Ok(self.model.score_timelapse(&seq)?.q_t)
    }

    pub fn optimize_viewfinder(&self) -> Result<StageResult<ViewfinderParams>> {
        argmax(self.space.viewfinder_candidates(self.scene), |vf| self.viewfinder_score(vf))?
            .ok_or_else(|| Error::Search("no grid point lies in the reachable region".into()))
    }

    /// Feasible path candidates: orbit needs a landmark, and every path must
    /// stay reachable.
    pub fn feasible_paths(&self, vf: &ViewfinderParams) -> Result<Vec<(usize, CameraPath)>> {
        if self.space.modes.is_empty() {
            return Err(Error::validation("modes", "must not be empty"));
        }
        let has_pivot = self.scene.primary_landmark().is_some();
        Ok(self
            .space
            .path_candidates()
            .into_iter()
            .enumerate()
            .filter(|(_, (mode, _))| has_pivot || *mode != PathMode::Orbit)
            .map(|(i, (mode, amplitude))| {
                (
                    i,
                    CameraPath {
                        mode,
                        amplitude,
                        base: *vf,
                    },
                )
            })
            .filter(|(_, p)| validate_path(p, self.scene).is_ok())
            .collect())
    }

    pub fn optimize_path(&self, vf: &ViewfinderParams) -> Result<StageResult<CameraPath>> {
        argmax(self.feasible_paths(vf)?, |p| self.path_score(p))?
            .ok_or_else(|| Error::Search("every path candidate is excluded".into()))
    }

    /// Windows whose frame count fits the budget, with their flat indices.
    pub fn feasible_windows(&self) -> Vec<(usize, TimeWarpParams)> {
        self.space
            .timewarp_candidates(&self.scene.georef)
            .into_iter()
            .enumerate()
            .filter(|(_, tw)| tw.validate().is_ok() && self.space.budget.admits(tw.frame_count()))
            .collect()
    }

    pub fn optimize_timewarp(&self, vf: &ViewfinderParams, path: &CameraPath) -> Result<StageResult<TimeWarpParams>> {
        argmax(self.feasible_windows(), |tw| {
            self.timewarp_score(&ShootingParameters::new(*vf, *path, *tw))
        })?
        .ok_or_else(|| Error::Search("no time window fits the frame budget".into()))
    }

    fn stage_rng(seed: u64, stage: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed ^ STAGE_SALTS[stage])
    }

    /// Uniform draw over the grid, resampled until reachable.
    pub fn random_viewfinder(&self, seed: u64) -> Result<ViewfinderParams> {
        let mut rng = Self::stage_rng(seed, 0);
        let grid = self.space.grid_locations(self.scene);
        for _ in 0..MAX_RANDOM_ATTEMPTS {
            let loc = grid[rng.random_range(0..grid.len())];
            let yaw_deg = self.space.yaw_deg[rng.random_range(0..self.space.yaw_deg.len())];
            let pitch_deg = self.space.pitch_deg[rng.random_range(0..self.space.pitch_deg.len())];
            if let Some(location) = loc {
                return Ok(ViewfinderParams {
                    location,
                    yaw_deg,
                    pitch_deg,
                });
            }
        }
        Err(Error::Search("random viewfinder draw exhausted its attempts".into()))
    }

    pub fn random_path(&self, vf: &ViewfinderParams, seed: u64) -> Result<CameraPath> {
        let mut rng = Self::stage_rng(seed, 1);
        let modes = &self.space.modes;
        if modes.is_empty() {
            return Err(Error::validation("modes", "must not be empty"));
        }
        let has_pivot = self.scene.primary_landmark().is_some();
        for _ in 0..MAX_RANDOM_ATTEMPTS {
            let mode = modes[rng.random_range(0..modes.len())];
            let levels = self.space.amplitudes.levels(mode);
            let amplitude = levels[rng.random_range(0..levels.len())];
            let path = CameraPath {
                mode,
                amplitude,
                base: *vf,
            };
            if (has_pivot || mode != PathMode::Orbit) && validate_path(&path, self.scene).is_ok() {
                return Ok(path);
            }
        }
        Err(Error::Search("random path draw exhausted its attempts".into()))
    }

    pub fn random_timewarp(&self, seed: u64) -> Result<TimeWarpParams> {
        let mut rng = Self::stage_rng(seed, 2);
        let s = self.space;
        for _ in 0..MAX_RANDOM_ATTEMPTS {
            let start = s.start_hours[rng.random_range(0..s.start_hours.len())];
            let duration = s.durations_h[rng.random_range(0..s.durations_h.len())];
            let interval = s.intervals_s[rng.random_range(0..s.intervals_s.len())];
            let tw = s.window(&self.scene.georef, start, duration, interval);
            if tw.validate().is_ok() && s.budget.admits(tw.frame_count()) {
                return Ok(tw);
            }
        }
        Err(Error::Search("random time window draw exhausted its attempts".into()))
    }

    /// Assessment of the probe sequence for `params`.
    pub fn assess_params(&self, params: &ShootingParameters) -> Result<QualityScore> {
        let seq = probe_sequence(self.scene, params, &self.settings, self.space.probe.sequence_frames)?;
        Ok(assess_detailed(self.model, &seq, self.scene)?.quality)
    }

    /// Runs the enabled stages in order image, video, time, each consuming
    /// the previous result; disabled stages are drawn from `seed`.
    /// `progress` receives the completed fraction after each stage.
    pub fn run(
        &self,
        stages: Stages,
        seed: u64,
        progress: &mut dyn FnMut(f64),
    ) -> Result<(ShootingParameters, OptimizationReport)> {
        let clock = Instant::now();
        let sizes = self.space.stage_sizes();
        let mut reports = Vec::with_capacity(3);
        let mut report = |stage: Stage, candidates: usize, r: Option<(usize, usize, f64)>| {
            reports.push(StageReport {
                stage,
                searched: r.is_some(),
                candidates,
                evaluated: r.map_or(0, |r| r.0),
                best_index: r.map(|r| r.1),
                best_score: r.map(|r| r.2),
            });
        };

        let vf = if stages.image {
            let r = self.optimize_viewfinder()?;
            report(Stage::Image, sizes[0], Some((r.evaluated, r.index, r.score)));
            r.best
        } else {
            report(Stage::Image, sizes[0], None);
            self.random_viewfinder(seed)?
        };
        progress(1.0 / 4.0);

        let path = if stages.video {
            let r = self.optimize_path(&vf)?;
            report(Stage::Video, sizes[1], Some((r.evaluated, r.index, r.score)));
            r.best
        } else {
            report(Stage::Video, sizes[1], None);
            self.random_path(&vf, seed)?
        };
        progress(2.0 / 4.0);

        let tw = if stages.time {
            let r = self.optimize_timewarp(&vf, &path)?;
            report(Stage::Time, sizes[2], Some((r.evaluated, r.index, r.score)));
            r.best
        } else {
            report(Stage::Time, sizes[2], None);
            self.random_timewarp(seed)?
        };
        progress(3.0 / 4.0);

        let params = ShootingParameters::new(vf, path, tw);
        params.validate_with_budget(self.scene, &self.space.budget)?;
        let score = self.assess_params(&params)?;
        progress(1.0);
        let total_evaluations = reports.iter().map(|r| r.evaluated).sum();
        Ok((
            params,
            OptimizationReport {
                stages: reports,
                total_evaluations,
                wall_time_s: clock.elapsed().as_secs_f64(),
                seed,
                params,
                score,
            },
        ))
    }
}

pub fn optimize_viewfinder(scene: &SceneDescription, space: &SearchSpace) -> Result<(ViewfinderParams, f64)> {
    let r = Optimizer::new(scene, space, &HeuristicModel)?.optimize_viewfinder()?;
    Ok((r.best, r.score))
}

pub fn optimize_path(
    scene: &SceneDescription,
    vf: &ViewfinderParams,
    space: &SearchSpace,
) -> Result<(CameraPath, f64)> {
    super::params::validate_viewfinder(vf, scene)?;
    let r = Optimizer::new(scene, space, &HeuristicModel)?.optimize_path(vf)?;
    Ok((r.best, r.score))
}

pub fn optimize_timewarp(
    scene: &SceneDescription,
    vf: &ViewfinderParams,
    path: &CameraPath,
    space: &SearchSpace,
) -> Result<(TimeWarpParams, f64)> {
    let r = Optimizer::new(scene, space, &HeuristicModel)?.optimize_timewarp(vf, path)?;
    Ok((r.best, r.score))
}

/// All three stages with the default scorer.
pub fn optimize_all(
    scene: &SceneDescription,
    space: &SearchSpace,
    seed: u64,
) -> Result<(ShootingParameters, OptimizationReport)> {
    Optimizer::new(scene, space, &HeuristicModel)?.run(Stages::ALL, seed, &mut |_| {})
}

/// Independent uniform draws for every parameter group.
pub fn random_params(scene: &SceneDescription, space: &SearchSpace, seed: u64) -> Result<ShootingParameters> {
    let opt = Optimizer::new(scene, space, &HeuristicModel)?;
    let vf = opt.random_viewfinder(seed)?;
    let path = opt.random_path(&vf, seed)?;
    let tw = opt.random_timewarp(seed)?;
    Ok(ShootingParameters::new(vf, path, tw))
}
