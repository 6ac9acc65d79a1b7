//! Shooting parameters and their staged exhaustive optimization.
//!
//! The search runs in three stages: viewfinder (location and aim) scored on
//! still probe frames, camera path scored on motion plus framing, and time
//! window scored on a low-resolution probe sequence. Each stage scans its
//! candidates in a fixed flat order and keeps the first best score.

mod ablation;
mod params;
mod space;
mod stages;

pub use ablation::{run_ablation, split_regions, AblationReport, AblationRow, ABLATION_ORDER};
pub use params::*;
pub use space::{daylight_span, probe_times, Amplitudes, GridSize, ProbeSettings, SearchSpace};
pub use stages::{
    optimize_all, optimize_path, optimize_timewarp, optimize_viewfinder, probe_sequence, random_params,
    OptimizationReport, Optimizer, Stage, StageReport, StageResult, Stages, PATH_IMAGE_WEIGHT, PATH_SCORE_SAMPLES,
};

#[cfg(test)]
mod tests;
