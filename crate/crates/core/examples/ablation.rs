//! Stage ablation over the five shipped synthetic scenes.
//!
//! Run with `cargo run --release --example ablation [draws]`.

use chronolapse::aesthetics::HeuristicModel;
use chronolapse::optimize::{run_ablation, SearchSpace};
use chronolapse::scene::load_scene_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let draws = std::env::args().nth(1).map_or(Ok(10), |a| a.parse())?;
    let space: SearchSpace = serde_json::from_str(&std::fs::read_to_string(format!("{data}/spaces/ablation.json"))?)?;
    let scenes = (0..5)
        .map(|i| load_scene_file(format!("{data}/scenes/ablation_{i}.json")))
        .collect::<Result<Vec<_>, _>>()?;

    let report = run_ablation(&scenes, &space, &HeuristicModel, draws, &mut |f| {
        eprint!("\r{:5.1}%", 100.0 * f);
    })?;
    eprintln!();
    println!("stages  mean total");
    for row in &report.rows {
        println!("{:<6}  {:.4}", row.stages.to_string(), row.mean_total);
    }
    println!(
        "regions {}, draws {}, gain {:.4}, monotone {}, {:.1} s",
        report.regions,
        report.draws,
        report.gain(),
        report.is_monotone(),
        report.wall_time_s
    );
    Ok(())
}
