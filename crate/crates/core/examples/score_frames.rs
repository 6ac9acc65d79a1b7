//! Scores a short render of the tutorial shot and prints every component.
//!
//! `cargo run --release --example score_frames`

use chronolapse::aesthetics::{assess_detailed, HeuristicModel};
use chronolapse::interface::load_params_file;
use chronolapse::optimize::probe_sequence;
use chronolapse::render::RenderSettings;
use chronolapse::scene::load_scene_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let scene = load_scene_file(format!("{data}/scenes/tutorial.json"))?;
    let params = load_params_file(format!("{data}/params/tutorial.json"), &scene)?;
    let frames = probe_sequence(&scene, &params, &RenderSettings::probe(), 48)?;
    let r = assess_detailed(&HeuristicModel, &frames, &scene)?;

    println!("image     exposure {:.3} contrast {:.3} colorfulness {:.3} thirds {:.3} -> {:.3}",
        r.image.exposure, r.image.contrast, r.image.colorfulness, r.image.thirds, r.image.q_i);
    println!("video     {:?}", r.video);
    println!("timelapse {:?}", r.timelapse);
    println!("total     {:.4}", r.quality.total);
    Ok(())
}
