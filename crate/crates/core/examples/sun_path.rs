//! Prints sun elevation and azimuth over a day at the tutorial scene.
//!
//! `cargo run --example sun_path [YYYY-MM-DD]`

use chrono::{Duration, NaiveDate};
use chronolapse::scene::{load_scene_file, solar_hour, sun_state};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = load_scene_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenes/tutorial.json"))?;
    let date: NaiveDate = std::env::args().nth(1).unwrap_or_else(|| "2024-06-21".into()).parse()?;
    let midnight = date.and_hms_opt(0, 0, 0).unwrap().and_utc();

    println!("{} at {:.3}, {:.3}", scene.name, scene.georef.lat0, scene.georef.lon0);
    println!("utc    solar h  elev    azim   irradiance");
    for half_hours in 0..48 {
        let t = midnight + Duration::minutes(30 * half_hours);
        let sun = sun_state(&scene.georef, &t);
        println!(
            "{}  {:6.2}  {:6.2}  {:6.1}  {:.3}",
            t.format("%H:%M"),
            solar_hour(&scene.georef, &t),
            sun.elevation_deg,
            sun.azimuth_deg,
            sun.irradiance
        );
    }
    Ok(())
}
