//! Renders one frame of the tutorial shot and writes it as a PNG.
//!
//! `cargo run --example render_preview -- [out.png] [2024-06-21T19:30:00Z]`

use chronolapse::interface::load_params_file;
use chronolapse::postproc::encode_png;
use chronolapse::render::{render_frame, RenderSettings};
use chronolapse::scene::load_scene_file;
use chronolapse::time::parse_timestamp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "preview.png".into());
    let scene = load_scene_file(format!("{data}/scenes/tutorial.json"))?;
    let params = load_params_file(format!("{data}/params/tutorial.json"), &scene)?;
    let t = match args.next() {
        Some(s) => parse_timestamp(&s).ok_or("bad timestamp")?,
        None => params.timewarp.start,
    };

    let pose = params.pose_at_time(&scene, &t)?;
    let frame = render_frame(&scene, &pose, &t, &RenderSettings::final_output(0.0, 0))?;
    std::fs::write(&out, encode_png(&frame)?)?;
    println!(
        "{out}: {}x{}, mean luminance {:.3}, pre-gain {:.4}",
        frame.width,
        frame.height,
        frame.mean_luminance(),
        frame.pre_gain_mean_luminance
    );
    Ok(())
}
