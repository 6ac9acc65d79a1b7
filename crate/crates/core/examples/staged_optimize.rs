//! Runs the staged search on the tutorial scene and compares it with
//! partially random stage selections.
//!
//! `cargo run --release --example staged_optimize [seed]`

use chronolapse::aesthetics::HeuristicModel;
use chronolapse::interface::{default_space, params_json};
use chronolapse::optimize::{Optimizer, Stages};
use chronolapse::scene::load_scene_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = load_scene_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenes/tutorial.json"))?;
    let seed = std::env::args().nth(1).map_or(Ok(1), |a| a.parse())?;
    let space = default_space();
    let opt = Optimizer::new(&scene, &space, &HeuristicModel)?;

    let mut best = None;
    for stages in ["", "i", "iv", "ivt"] {
        let stages = Stages::parse(stages)?;
        let (params, report) = opt.run(stages, seed, &mut |_| {})?;
        println!(
            "{:<4} total {:.4}  evaluated {:4}  {:.1} s",
            stages.to_string(),
            report.score.total,
            report.total_evaluations,
            report.wall_time_s
        );
        best = Some(params);
    }
    print!("{}", params_json(&best.unwrap()));
    Ok(())
}
