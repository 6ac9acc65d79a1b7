//! Stage ablation: scores plans with stages enabled cumulatively (none,
//! image, image + video, all three) over every region of several scenes.
//! Disabled stages are drawn at random and averaged over seeds.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::params::ShootingParameters;
use super::space::SearchSpace;
use super::stages::{Optimizer, Stages};
use crate::aesthetics::AestheticModel;
use crate::error::{Error, Result};
use crate::scene::SceneDescription;

pub const ABLATION_ORDER: [Stages; 4] = [
    Stages::NONE,
    Stages {
        image: true,
        video: false,
        time: false,
    },
    Stages {
        image: true,
        video: true,
        time: false,
    },
    Stages::ALL,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub stages: Stages,
    /// Mean total score over regions (each region averaged over draws).
    pub mean_total: f64,
    pub region_totals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub regions: usize,
    pub draws: usize,
    pub wall_time_s: f64,
}

impl AblationReport {
    /// Mean totals never decrease as stages are enabled.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].mean_total >= w[0].mean_total)
    }

    /// Full method minus the all-random baseline.
    pub fn gain(&self) -> f64 {
        self.rows[self.rows.len() - 1].mean_total - self.rows[0].mean_total
    }
}

/// One sub-scene per reachable rectangle.
pub fn split_regions(scene: &SceneDescription) -> Vec<SceneDescription> {
    scene
        .reachable
        .rects
        .iter()
        .map(|r| {
            let mut s = scene.clone();
            s.reachable.rects = vec![*r];
            s
        })
        .collect()
}

/// Mean total of each ablation row on a single region.
fn region_totals(opt: &Optimizer<'_>, draws: usize) -> Result<[f64; 4]> {
    let vf = opt.optimize_viewfinder()?.best;
    let path = opt.optimize_path(&vf)?.best;
    let tw = opt.optimize_timewarp(&vf, &path)?.best;
    let total = |p: ShootingParameters| opt.assess_params(&p).map(|q| q.total);
    let mut sums = [0.0; 3];
    for seed in 0..draws as u64 {
        let rvf = opt.random_viewfinder(seed)?;
        let rpath = opt.random_path(&rvf, seed)?;
        let rtw = opt.random_timewarp(seed)?;
        sums[0] += total(ShootingParameters::new(rvf, rpath, rtw))?;
        sums[1] += total(ShootingParameters::new(vf, opt.random_path(&vf, seed)?, rtw))?;
        sums[2] += total(ShootingParameters::new(vf, path, rtw))?;
    }
    let n = draws as f64;
    Ok([sums[0] / n, sums[1] / n, sums[2] / n, total(ShootingParameters::new(vf, path, tw))?])
}

pub fn run_ablation(
    scenes: &[SceneDescription],
    space: &SearchSpace,
    model: &dyn AestheticModel,
    draws: usize,
    progress: &mut dyn FnMut(f64),
) -> Result<AblationReport> {
    if draws == 0 {
        return Err(Error::validation("draws", "must be at least 1"));
    }
    let clock = Instant::now();
    let regions: Vec<SceneDescription> = scenes.iter().flat_map(split_regions).collect();
    if regions.is_empty() {
        return Err(Error::validation("scenes", "need at least one reachable region"));
    }
    let mut per_row: [Vec<f64>; 4] = Default::default();
    for (i, region) in regions.iter().enumerate() {
        let opt = Optimizer::new(region, space, model)?;
        let totals = region_totals(&opt, draws)?;
        for (row, t) in per_row.iter_mut().zip(totals) {
            row.push(t);
        }
        progress((i + 1) as f64 / regions.len() as f64);
    }
    let rows = ABLATION_ORDER
        .iter()
        .zip(per_row)
        .map(|(&stages, region_totals)| AblationRow {
            stages,
            mean_total: region_totals.iter().sum::<f64>() / region_totals.len() as f64,
            region_totals,
        })
        .collect();
    Ok(AblationReport {
        rows,
        regions: regions.len(),
        draws,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}
