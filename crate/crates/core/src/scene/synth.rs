//! Seeded generator for the evaluation scenes shipped under `data/scenes`.
//!
//! Each generated scene has a landmark cluster near the origin, scattered
//! buildings, looping foot and road traffic, and four reachable areas, one
//! per quadrant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    AgentKind, AgentRoute, GeoReference, Ground, ReachableRegion, Rect, SceneDescription,
    SkyParams, Solid,
};

const HALF_EXTENT: f64 = 300.0;

pub fn generate(seed: u64) -> SceneDescription {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let georef = GeoReference {
        lat0: round3(rng.random_range(22.0..52.0)),
        lon0: round3(rng.random_range(-8.0..8.0)),
        alt0: round3(rng.random_range(0.0..400.0)),
        heading_deg: round3(rng.random_range(0.0..360.0)),
    };
    let albedo = [
        round3(rng.random_range(0.25..0.4)),
        round3(rng.random_range(0.3..0.45)),
        round3(rng.random_range(0.2..0.32)),
    ];

    let ground = if seed % 2 == 1 {
        let cells = 13;
        let cell_size = 2.0 * HALF_EXTENT / (cells - 1) as f64;
        let ridge = rng.random_range(18.0..40.0);
        let elevations = (0..cells)
            .map(|r| {
                (0..cells)
                    .map(|c| {
                        let x = -HALF_EXTENT + c as f64 * cell_size;
                        let y = -HALF_EXTENT + r as f64 * cell_size;
                        let d = (x * x + y * y).sqrt();
                        let t = ((d - 220.0) / 100.0).clamp(0.0, 1.0);
                        round3(ridge * t * t * (3.0 - 2.0 * t))
                    })
                    .collect()
            })
            .collect();
        Ground::Heightfield {
            cell_size,
            elevations,
            albedo,
        }
    } else {
        Ground::Flat {
            albedo,
            half_extent: HALF_EXTENT,
        }
    };

    // four shooting areas, one per quadrant
    let mut rects = Vec::new();
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        let d = rng.random_range(70.0..120.0);
        let half = rng.random_range(20.0..35.0);
        let (cx, cy) = (sx * d, sy * d);
        rects.push(Rect {
            x_min: round3(cx - half),
            x_max: round3(cx + half),
            y_min: round3(cy - half),
            y_max: round3(cy + half),
        });
    }

    let mut solids = Vec::new();
    let tower_h = rng.random_range(40.0..70.0);
    solids.push(Solid {
        center: [0.0, 0.0, round3(tower_h / 2.0)],
        size: [12.0, 12.0, round3(tower_h)],
        albedo: [0.85, 0.78, 0.62],
        landmark: Some(1.0),
    });
    for _ in 0..2 {
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let r = rng.random_range(25.0..45.0);
        let h = rng.random_range(12.0..25.0);
        solids.push(Solid {
            center: [round3(r * angle.cos()), round3(r * angle.sin()), round3(h / 2.0)],
            size: [8.0, 8.0, round3(h)],
            albedo: [
                round3(rng.random_range(0.5..0.9)),
                round3(rng.random_range(0.2..0.5)),
                round3(rng.random_range(0.15..0.4)),
            ],
            landmark: Some(round3(rng.random_range(0.3..0.7))),
        });
    }
    let mut placed = 0;
    while placed < 10 {
        let x = rng.random_range(-240.0..240.0);
        let y = rng.random_range(-240.0..240.0);
        let w = rng.random_range(10.0..25.0);
        let d = rng.random_range(10.0..25.0);
        let h = rng.random_range(6.0..30.0);
        let footprint = Rect {
            x_min: x - w / 2.0 - 4.0,
            x_max: x + w / 2.0 + 4.0,
            y_min: y - d / 2.0 - 4.0,
            y_max: y + d / 2.0 + 4.0,
        };
        let clear_of_areas = rects.iter().all(|r| !overlaps(r, &footprint));
        if (x * x + y * y).sqrt() < 60.0 || !clear_of_areas {
            continue;
        }
        let grey = rng.random_range(0.35..0.75);
        solids.push(Solid {
            center: [round3(x), round3(y), round3(h / 2.0)],
            size: [round3(w), round3(d), round3(h)],
            albedo: [round3(grey), round3(grey * 0.95), round3(grey * 0.9)],
            landmark: None,
        });
        placed += 1;
    }

    let ring = rng.random_range(50.0..60.0);
    let agents = vec![
        AgentRoute {
            kind: AgentKind::Vehicle,
            polyline: vec![[-ring, -ring], [ring, -ring], [ring, ring], [-ring, ring], [-ring, -ring]],
            speed: round3(rng.random_range(6.0..12.0)),
            count: rng.random_range(3..6),
            phase_spread: 1.0,
        },
        AgentRoute {
            kind: AgentKind::Person,
            polyline: vec![[-150.0, 0.0], [150.0, 0.0]],
            speed: round3(rng.random_range(1.0..1.6)),
            count: rng.random_range(4..9),
            phase_spread: 1.0,
        },
        AgentRoute {
            kind: AgentKind::Person,
            polyline: vec![[0.0, -150.0], [0.0, 150.0]],
            speed: round3(rng.random_range(1.0..1.6)),
            count: rng.random_range(4..9),
            phase_spread: 1.0,
        },
    ];

    SceneDescription {
        name: format!("synthetic-{seed}"),
        georef,
        ground,
        solids,
        reachable: ReachableRegion {
            rects,
            height_range: [1.5, round3(rng.random_range(15.0..30.0))],
        },
        agents,
        sky: SkyParams {
            haze: round3(rng.random_range(0.15..0.45)),
            ..SkyParams::default()
        },
    }
}

fn overlaps(a: &Rect, b: &Rect) -> bool {
    a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}
