//! Compiles the tutorial shot into a GPS waypoint plan.
//!
//! `cargo run --example robot_export [waypoints]`

use chronolapse::interface::load_params_file;
use chronolapse::robotplan::{compile_plan, gps_to_local, serialize_plan};
use chronolapse::scene::load_scene_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let count = std::env::args().nth(1).map_or(Ok(4), |a| a.parse())?;
    let scene = load_scene_file(format!("{data}/scenes/tutorial.json"))?;
    let params = load_params_file(format!("{data}/params/tutorial.json"), &scene)?;
    let plan = compile_plan(&scene, &params, &scene.georef, count)?;

    for w in &plan.waypoints {
        let local = gps_to_local(&plan.georef, w.lat, w.lon, w.alt_m)?;
        eprintln!(
            "{}  local ({:.2}, {:.2}, {:.2})  bearing {:.1}  tilt {:.1}",
            w.time.format("%H:%M:%S"),
            local[0],
            local[1],
            local[2],
            w.gimbal_yaw_deg,
            w.gimbal_pitch_deg
        );
    }
    print!("{}", serialize_plan(&plan));
    Ok(())
}
