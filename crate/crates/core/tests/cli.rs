use std::path::Path;
use std::process::{Command, Output};

use chronolapse::aesthetics::{assess_detailed, HeuristicModel, ScoreReport};
use chronolapse::interface::cli_main;
use chronolapse::postproc::{flicker_index, read_output};
use chronolapse::robotplan::deserialize_plan;

const BIN: &str = env!("CARGO_BIN_EXE_chronolapse");
const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
const DATA_TUTORIAL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenes/tutorial.json");

fn data(rel: &str) -> String {
    format!("{DATA}/{rel}")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CHRONO_SCENE")
        .env_remove("CHRONO_PORT")
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/robot_plan.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["frobnicate"][..], &["plan"], &["render", "--scene", "x.json"], &["deflicker", "--frames", "a", "--out", "b", "--method", "median"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(cli_main(["chronolapse", "plan", "--seed", "x"]), 2);
}

#[test]
fn failures_exit_one_with_a_single_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad_space = dir.path().join("space.json");
    std::fs::write(&bad_space, r#"{"date": "2024-06-21", "grid": {"nx": 0, "ny": 1, "nz": 1},
        "yaw_deg": [0], "pitch_deg": [0], "modes": ["static"], "amplitudes": {"pan": [], "truck": [], "orbit": []},
        "start_hours": [12], "durations_h": [1], "intervals_s": [30]}"#)
    .unwrap();
    let cases: [Vec<&str>; 4] = [
        vec!["plan", "--scene", "/nonexistent/scene.json"],
        vec!["plan", "--scene", DATA_TUTORIAL, "--space", p(&bad_space)],
        vec!["plan", "--scene", DATA_TUTORIAL, "--stages", "abc"],
        vec!["assess", "--frames", p(dir.path())],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}

#[test]
fn scene_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("plan.json");
    let status = Command::new(BIN)
        .args(["export", "--params", &data("params/tutorial.json"), "--out", p(&out_file)])
        .env("CHRONO_SCENE", DATA_TUTORIAL)
        .status()
        .unwrap();
    assert!(status.success());
    let golden = std::fs::read(data("golden/tutorial_robot_plan.json")).unwrap();
    assert_eq!(std::fs::read(&out_file).unwrap(), golden);

    // flags win over the environment
    let status = Command::new(BIN)
        .args(["export", "--scene", DATA_TUTORIAL, "--params", &data("params/tutorial.json")])
        .env("CHRONO_SCENE", "/nonexistent.json")
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(status.stdout, golden);
}

#[test]
fn export_overrides_georef() {
    let out = ok(&[
        "export", "--scene", DATA_TUTORIAL, "--params", &data("params/tutorial.json"),
        "--lat0", "-33.9", "--lon0", "18.4", "--heading", "90", "--waypoints", "5",
    ]);
    let plan = deserialize_plan(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(plan.waypoints.len(), 5);
    assert_eq!(plan.georef.lat0, -33.9);
    assert_eq!(plan.georef.alt0, 12.0);
    assert_eq!(plan.georef.heading_deg, 90.0);
}

#[test]
fn plan_render_deflicker_assess_export() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);
    let (params, report, raw, clean, plan) = (d("params.json"), d("report.json"), d("raw"), d("clean"), d("plan.json"));
    ok(&["plan", "--scene", DATA_TUTORIAL, "--space", &data("spaces/default.json"), "--seed", "1", "--out", p(&params), "--report", p(&report)]);
    assert_eq!(std::fs::read(&params).unwrap(), std::fs::read(data("params/tutorial.json")).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(report["stages"].as_array().unwrap().len(), 3);

    ok(&["render", "--scene", DATA_TUTORIAL, "--params", p(&params), "--out", p(&raw), "--width", "64", "--height", "36"]);
    let rendered = read_output(&raw).unwrap();
    assert_eq!(rendered.frames.len(), 481);

    let summary = ok(&["deflicker", "--frames", p(&raw), "--out", p(&clean)]);
    let summary: serde_json::Value = serde_json::from_slice(&summary.stdout).unwrap();
    let cleaned = read_output(&clean).unwrap();
    assert_eq!(summary["flicker_after"].as_f64().unwrap(), flicker_index(&cleaned).unwrap());
    assert!(flicker_index(&cleaned).unwrap() < flicker_index(&rendered).unwrap());

    let scored = ok(&["assess", "--frames", p(&clean)]);
    let cli_report: ScoreReport = serde_json::from_slice(&scored.stdout).unwrap();
    let scene = chronolapse::scene::load_scene_file(DATA_TUTORIAL).unwrap();
    let lib_report = assess_detailed(&HeuristicModel, &cleaned, &scene).unwrap();
    assert_eq!(cli_report, lib_report);

    ok(&["export", "--scene", DATA_TUTORIAL, "--params", p(&params), "--out", p(&plan)]);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&plan).unwrap()).unwrap();
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn schema_rejects_malformed_plans() {
    let validator = schema();
    let golden: serde_json::Value =
        serde_json::from_slice(&std::fs::read(data("golden/tutorial_robot_plan.json")).unwrap()).unwrap();
    assert!(validator.is_valid(&golden));
    let mut no_capture = golden.clone();
    no_capture.as_object_mut().unwrap().remove("capture");
    assert!(!validator.is_valid(&no_capture));
    let mut bad_yaw = golden.clone();
    bad_yaw["waypoints"][0]["gimbal_yaw_deg"] = 360.0.into();
    assert!(!validator.is_valid(&bad_yaw));
    let mut local_time = golden;
    local_time["capture"]["start"] = "2024-06-21T18:21:18+02:00".into();
    assert!(!validator.is_valid(&local_time));
}
