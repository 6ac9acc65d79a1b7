use super::*;
use crate::aesthetics::{score_timelapse, HeuristicModel};
use crate::error::Error;
use crate::scene::{load_scene, SceneDescription};
use chrono::NaiveDate;

fn scene(with_landmark: bool) -> SceneDescription {
    let solids = if with_landmark {
        r#"[{"center": [0,0,15], "size": [8,8,30], "albedo": [0.85,0.8,0.7], "landmark": 1.0}]"#
    } else {
        r#"[{"center": [0,0,15], "size": [8,8,30], "albedo": [0.85,0.8,0.7]}]"#
    };
    load_scene(&format!(
        r#"{{
        "name": "o",
        "georef": {{"lat0": 40, "lon0": 0, "alt0": 0, "heading_deg": 0}},
        "ground": {{"flat": {{"albedo": [0.4,0.4,0.35], "half_extent": 300}}}},
        "solids": {solids},
        "reachable": {{"rects": [{{"x_min": 40, "x_max": 100, "y_min": -30, "y_max": 30}}], "height_range": [2, 10]}},
        "sky": {{"day_zenith": [0.22,0.42,0.85], "night_zenith": [0.002,0.002,0.006], "haze": 0.2}}
    }}"#
    ))
    .unwrap()
}

fn space() -> SearchSpace {
    SearchSpace {
        date: NaiveDate::from_ymd_opt(2024, 6, 21).unwrap(),
        grid: GridSize { nx: 2, ny: 1, nz: 1 },
        yaw_deg: vec![0.0, 180.0],
        pitch_deg: vec![5.0],
        modes: vec![PathMode::Static, PathMode::Pan, PathMode::Orbit],
        amplitudes: Amplitudes {
            pan: vec![20.0],
            truck: vec![10.0],
            orbit: vec![15.0],
        },
        start_hours: vec![12.0, 18.5],
        durations_h: vec![1.0],
        intervals_s: vec![30.0, 60.0],
        budget: FrameBudget::default(),
        probe: ProbeSettings {
            width: 32,
            height: 18,
            timestamps: 3,
            sequence_frames: 12,
        },
    }
}

#[test]
fn grid_is_cell_centered_and_location_major() {
    let s = scene(true);
    let sp = SearchSpace {
        grid: GridSize { nx: 2, ny: 3, nz: 2 },
        ..space()
    };
    let grid = sp.grid_locations(&s);
    assert_eq!(grid.len(), 12);
    assert_eq!(grid[0], Some([55.0, -20.0, 4.0]));
    assert_eq!(grid[1], Some([55.0, -20.0, 8.0]));
    assert_eq!(grid[2], Some([55.0, 0.0, 4.0]));
    assert_eq!(grid[11], Some([85.0, 20.0, 8.0]));
    let cands = sp.viewfinder_candidates(&s);
    assert_eq!(cands.len(), 24);
    assert_eq!(cands[3].0, 3);
    assert_eq!(cands[3].1.location, grid[1].unwrap());
    assert_eq!(cands[3].1.yaw_deg, 180.0);
}

#[test]
fn unreachable_grid_points_keep_their_indices() {
    let mut s = scene(true);
    s.reachable.rects.push(crate::scene::Rect {
        x_min: -100.0,
        x_max: -40.0,
        y_min: -30.0,
        y_max: 30.0,
    });
    // three columns over [-100, 100]: the middle one misses both rects
    let sp = SearchSpace {
        grid: GridSize { nx: 3, ny: 1, nz: 1 },
        ..space()
    };
    let idx: Vec<usize> = sp.viewfinder_candidates(&s).iter().map(|c| c.0).collect();
    assert_eq!(idx, vec![0, 1, 4, 5]);
}

#[test]
fn probe_times_sit_inside_daylight() {
    let s = scene(true);
    let date = NaiveDate::from_ymd_opt(2024, 6, 21).unwrap();
    let (rise, set) = daylight_span(&s.georef, date).unwrap();
    // 40N at the June solstice: roughly 15 hours of daylight
    let hours = (set - rise).num_minutes() as f64 / 60.0;
    assert!((14.5..15.5).contains(&hours), "{hours}");
    let probes = probe_times(&s.georef, date, 3);
    assert_eq!(probes.len(), 3);
    assert!(rise < probes[0] && probes[0] < probes[1] && probes[1] < probes[2] && probes[2] < set);
    assert!((probes[1] - (rise + (set - rise) / 2)).num_seconds().abs() <= 1);
    // polar night falls back to the whole day
    let arctic = crate::scene::GeoReference { lat0: 80.0, ..s.georef };
    let winter = NaiveDate::from_ymd_opt(2024, 12, 21).unwrap();
    assert!(daylight_span(&arctic, winter).is_none());
    assert_eq!(probe_times(&arctic, winter, 1)[0], winter.and_hms_opt(12, 0, 0).unwrap().and_utc());
}

#[test]
fn singleton_space_returns_its_only_candidate() {
    let s = scene(true);
    let sp = SearchSpace {
        grid: GridSize { nx: 1, ny: 1, nz: 1 },
        yaw_deg: vec![180.0],
        modes: vec![PathMode::Static],
        start_hours: vec![12.0],
        intervals_s: vec![30.0],
        ..space()
    };
    let opt = Optimizer::new(&s, &sp, &HeuristicModel).unwrap();
    let (params, report) = opt.run(Stages::ALL, 9, &mut |_| {}).unwrap();
    assert_eq!(params.viewfinder.location, [70.0, 0.0, 6.0]);
    assert_eq!(params.path, CameraPath::fixed(params.viewfinder));
    assert_eq!(params.timewarp.frame_count(), 121);
    let order: Vec<Stage> = report.stages.iter().map(|r| r.stage).collect();
    assert_eq!(order, vec![Stage::Image, Stage::Video, Stage::Time]);
    assert!(report.stages.iter().all(|r| r.evaluated == 1 && r.best_index == Some(0)));
    assert_eq!(report.total_evaluations, 3);
    let vf_score = opt.viewfinder_score(&params.viewfinder).unwrap();
    assert_eq!(report.stages[0].best_score, Some(vf_score));
    assert!((report.score.total - (report.score.q_i + report.score.q_v + report.score.q_t) / 3.0).abs() < 1e-12);
    // the same draw for any seed
    assert_eq!(random_params(&s, &sp, 1).unwrap(), random_params(&s, &sp, 2).unwrap());
    assert_eq!(random_params(&s, &sp, 1).unwrap(), params);
}

#[test]
fn duplicate_candidates_resolve_to_the_first() {
    let s = scene(true);
    let sp = SearchSpace {
        yaw_deg: vec![180.0, 180.0],
        pitch_deg: vec![5.0, 5.0],
        ..space()
    };
    let opt = Optimizer::new(&s, &sp, &HeuristicModel).unwrap();
    let r = opt.optimize_viewfinder().unwrap();
    assert_eq!(r.index % 4, 0);
    assert_eq!(r.evaluated, 8);
}

#[test]
fn viewfinder_stage_returns_the_best_candidate() {
    let s = scene(true);
    let sp = space();
    let (vf, score) = optimize_viewfinder(&s, &sp).unwrap();
    let opt = Optimizer::new(&s, &sp, &HeuristicModel).unwrap();
    assert_eq!(opt.viewfinder_score(&vf).unwrap(), score);
    for (_, c) in sp.viewfinder_candidates(&s) {
        assert!(opt.viewfinder_score(&c).unwrap() <= score);
    }
}

#[test]
fn static_only_modes_give_a_static_path() {
    let s = scene(true);
    let sp = SearchSpace {
        modes: vec![PathMode::Static],
        ..space()
    };
    let vf = ViewfinderParams {
        location: [70.0, 0.0, 6.0],
        yaw_deg: 180.0,
        pitch_deg: 5.0,
    };
    let (path, _) = optimize_path(&s, &vf, &sp).unwrap();
    assert_eq!((path.mode, path.amplitude), (PathMode::Static, 0.0));
}

#[test]
fn orbit_needs_a_landmark() {
    let s = scene(false);
    let vf = ViewfinderParams {
        location: [70.0, 0.0, 6.0],
        yaw_deg: 180.0,
        pitch_deg: 5.0,
    };
    let opt_space = space();
    let opt = Optimizer::new(&s, &opt_space, &HeuristicModel).unwrap();
    let modes: Vec<PathMode> = opt.feasible_paths(&vf).unwrap().iter().map(|(_, p)| p.mode).collect();
    assert_eq!(modes, vec![PathMode::Static, PathMode::Pan]);

    let orbit_only = SearchSpace {
        modes: vec![PathMode::Orbit],
        ..space()
    };
    assert!(matches!(optimize_path(&s, &vf, &orbit_only), Err(Error::Search(_))));
    let no_modes = SearchSpace { modes: vec![], ..space() };
    assert_eq!(optimize_path(&s, &vf, &no_modes).unwrap_err().field(), Some("modes"));
}

#[test]
fn paths_leaving_the_region_are_excluded() {
    let s = scene(true);
    let sp = SearchSpace {
        modes: vec![PathMode::Truck],
        amplitudes: Amplitudes {
            truck: vec![500.0, 10.0],
            ..space().amplitudes
        },
        ..space()
    };
    let vf = ViewfinderParams {
        location: [70.0, 0.0, 6.0],
        yaw_deg: 180.0,
        pitch_deg: 5.0,
    };
    let opt = Optimizer::new(&s, &sp, &HeuristicModel).unwrap();
    let r = opt.optimize_path(&vf).unwrap();
    assert_eq!((r.index, r.best.amplitude, r.evaluated), (1, 10.0, 1));
}

#[test]
fn short_windows_fall_outside_the_budget() {
    let s = scene(true);
    let opt_space = space();
    let opt = Optimizer::new(&s, &opt_space, &HeuristicModel).unwrap();
    // 1 h at 60 s is 61 frames: only the 30 s windows survive
    let windows = opt.feasible_windows();
    assert_eq!(windows.iter().map(|w| w.0).collect::<Vec<_>>(), vec![0, 2]);
    assert!(windows.iter().all(|(_, tw)| tw.frame_count() == 121));

    let tight = SearchSpace {
        intervals_s: vec![60.0],
        ..space()
    };
    let vf = ViewfinderParams {
        location: [70.0, 0.0, 6.0],
        yaw_deg: 180.0,
        pitch_deg: 5.0,
    };
    let err = optimize_timewarp(&s, &vf, &CameraPath::fixed(vf), &tight).unwrap_err();
    assert!(matches!(err, Error::Search(_)));
}

#[test]
fn sunset_window_beats_midday() {
    let s = scene(true);
    // 18:30 to 20:30 local solar time runs from golden hour into dusk
    let sp = SearchSpace {
        start_hours: vec![11.0, 18.5],
        durations_h: vec![2.0],
        intervals_s: vec![30.0],
        ..space()
    };
    let vf = ViewfinderParams {
        location: [70.0, 0.0, 6.0],
        yaw_deg: 180.0,
        pitch_deg: 5.0,
    };
    let path = CameraPath::fixed(vf);
    let opt = Optimizer::new(&s, &sp, &HeuristicModel).unwrap();
    let light = |tw: &TimeWarpParams| {
        let p = ShootingParameters::new(vf, path, *tw);
        let seq = probe_sequence(&s, &p, &sp.probe.render_settings(), sp.probe.sequence_frames).unwrap();
        score_timelapse(&seq).unwrap().light_dynamism
    };
    let windows = opt.feasible_windows();
    let (midday, sunset) = (windows[0].1, windows[1].1);
    assert!(light(&sunset) > light(&midday));
    let r = opt.optimize_timewarp(&vf, &path).unwrap();
    assert_eq!(r.best, sunset);
}

#[test]
fn random_draws_are_feasible_and_seeded() {
    let s = scene(true);
    let sp = SearchSpace {
        grid: GridSize { nx: 4, ny: 4, nz: 3 },
        modes: PathMode::ALL.to_vec(),
        amplitudes: Amplitudes {
            pan: vec![10.0, 90.0],
            truck: vec![5.0, 100.0],
            orbit: vec![5.0, 60.0],
        },
        intervals_s: vec![10.0, 30.0, 60.0],
        ..space()
    };
    assert_eq!(random_params(&s, &sp, 5).unwrap(), random_params(&s, &sp, 5).unwrap());
    let mut distinct = std::collections::HashSet::new();
    for seed in 0..1000 {
        let p = random_params(&s, &sp, seed).unwrap();
        p.validate_with_budget(&s, &sp.budget).unwrap();
        distinct.insert(format!("{:?}", p.viewfinder.location));
    }
    assert!(distinct.len() > 5);
}

#[test]
fn stage_letters() {
    assert_eq!(Stages::parse("ivt").unwrap(), Stages::ALL);
    assert_eq!(Stages::parse("").unwrap(), Stages::NONE);
    let iv = Stages::parse("VI").unwrap();
    assert!(iv.image && iv.video && !iv.time);
    assert_eq!(iv.to_string(), "iv");
    assert_eq!(Stages::NONE.to_string(), "-");
    assert_eq!(Stages::parse("x").unwrap_err().field(), Some("stages"));
}

#[test]
fn space_validation_names_fields() {
    let mut sp = space();
    sp.yaw_deg.clear();
    assert_eq!(sp.validate().unwrap_err().field(), Some("yaw_deg"));
    let mut sp = space();
    sp.grid.nz = 0;
    assert_eq!(sp.validate().unwrap_err().field(), Some("grid"));
    let mut sp = space();
    sp.amplitudes.pan = vec![0.0];
    assert_eq!(sp.validate().unwrap_err().field(), Some("amplitudes.pan"));
    let text = serde_json::to_string(&space()).unwrap();
    assert_eq!(serde_json::from_str::<SearchSpace>(&text).unwrap(), space());
}
