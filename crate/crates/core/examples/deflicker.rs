//! Renders the tutorial shot with exposure jitter and removes the flicker.
//!
//! `cargo run --release --example deflicker [jitter_sigma]`

use chronolapse::interface::load_params_file;
use chronolapse::postproc::{deflicker, flicker_index, DeflickerConfig, DeflickerMethod};
use chronolapse::render::{render_sequence, RenderSettings};
use chronolapse::scene::load_scene_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let sigma = std::env::args().nth(1).map_or(Ok(0.1), |a| a.parse())?;
    let scene = load_scene_file(format!("{data}/scenes/tutorial.json"))?;
    let params = load_params_file(format!("{data}/params/tutorial.json"), &scene)?;
    let settings = RenderSettings::final_output(sigma, 7).with_size(64, 36);
    let raw = render_sequence(&scene, &params, &settings)?;
    println!("{} frames, flicker {:.4}", raw.frames.len(), flicker_index(&raw)?);

    for method in [DeflickerMethod::GainMatch, DeflickerMethod::Histeq, DeflickerMethod::Both] {
        let config = DeflickerConfig { method, ..Default::default() };
        let out = deflicker(&raw, &config)?;
        println!("{method:?}: flicker {:.4}", flicker_index(&out)?);
    }
    Ok(())
}
