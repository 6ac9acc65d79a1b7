//! Generates synthetic city scenes and writes them as scene files.
//!
//! `cargo run --example generate_scenes -- <out_dir> [seed...]`

use chronolapse::scene::{serialize_scene, synth};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| ".".into());
    let seeds: Vec<u64> = args.map(|a| a.parse().expect("seed must be an integer")).collect();
    let seeds = if seeds.is_empty() { vec![0] } else { seeds };
    std::fs::create_dir_all(&out)?;
    for seed in seeds {
        let scene = synth::generate(seed);
        let path = format!("{out}/synth_{seed}.json");
        std::fs::write(&path, serialize_scene(&scene))?;
        println!(
            "{path}: {} solids, {} agent routes, {} reachable areas",
            scene.solids.len(),
            scene.agents.len(),
            scene.reachable.rects.len()
        );
    }
    Ok(())
}
