use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AgentKind, AgentRoute, SceneDescription};
use crate::time::{epoch_seconds, Timestamp};

/// Where one agent is at a given instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentPlacement {
    pub kind: AgentKind,
    pub position: [f64; 2],
    /// Direction of travel, counterclockwise from +x.
    pub heading_deg: f64,
}

/// Positions of every agent at `t`. Each agent advances along its route at
/// constant speed from the Unix epoch, wrapping around the route length.
pub fn agent_positions(scene: &SceneDescription, t: &Timestamp, seed: u64) -> Vec<AgentPlacement> {
    let elapsed = epoch_seconds(t);
    let mut out = Vec::new();
    for (route_index, route) in scene.agents.iter().enumerate() {
        let length = route.length();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (route_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..route.count {
            let u: f64 = rng.random();
            let offset = route.phase_spread * u * length;
            let travelled = (route.speed * elapsed).rem_euclid(length);
            let arc = (offset + travelled).rem_euclid(length);
            let (position, heading_deg) = point_at_arc(route, arc);
            out.push(AgentPlacement {
                kind: route.kind,
                position,
                heading_deg,
            });
        }
    }
    out
}

fn point_at_arc(route: &AgentRoute, arc: f64) -> ([f64; 2], f64) {
    let mut remaining = arc;
    let segments = route.polyline.windows(2);
    let count = route.polyline.len() - 1;
    for (i, w) in segments.enumerate() {
        let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
        let len = (dx * dx + dy * dy).sqrt();
        if len == 0.0 {
            continue;
        }
        if remaining <= len || i == count - 1 {
            let f = (remaining / len).min(1.0);
            return (
                [w[0][0] + f * dx, w[0][1] + f * dy],
                dy.atan2(dx).to_degrees(),
            );
        }
        remaining -= len;
    }
    (route.polyline[0], 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::load_scene;
    use chrono::{Duration, TimeZone, Utc};

    fn scene_with(routes: &str) -> SceneDescription {
        load_scene(&format!(
            r#"{{
            "name": "agents",
            "georef": {{"lat0": 0, "lon0": 0, "alt0": 0, "heading_deg": 0}},
            "ground": {{"flat": {{"albedo": [0.5,0.5,0.5], "half_extent": 100}}}},
            "reachable": {{"rects": [{{"x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1}}], "height_range": [1, 2]}},
            "agents": [{routes}]
        }}"#
        ))
        .unwrap()
    }

    #[test]
    fn epoch_with_zero_phase_is_route_start() {
        let scene = scene_with(
            r#"{"kind": "person", "polyline": [[3,4],[13,4]], "speed": 1.3, "count": 3, "phase_spread": 0},
               {"kind": "vehicle", "polyline": [[-5,-5],[-5,20],[30,20]], "speed": 9, "count": 2, "phase_spread": 0}"#,
        );
        let t = Utc.timestamp_opt(0, 0).unwrap();
        let agents = agent_positions(&scene, &t, 99);
        assert_eq!(agents.len(), 5);
        for a in &agents[..3] {
            assert_eq!(a.position, [3.0, 4.0]);
        }
        for a in &agents[3..] {
            assert_eq!(a.position, [-5.0, -5.0]);
            assert_eq!(a.heading_deg, 90.0);
        }
    }

    #[test]
    fn arc_length_wraps_modulo_route_length() {
        let scene = scene_with(
            r#"{"kind": "person", "polyline": [[0,0],[10,0]], "speed": 1, "count": 1, "phase_spread": 0}"#,
        );
        let t = Utc.timestamp_opt(0, 0).unwrap() + Duration::seconds(12);
        let agents = agent_positions(&scene, &t, 1);
        assert!((agents[0].position[0] - 2.0).abs() < 1e-12);
        assert_eq!(agents[0].position[1], 0.0);
    }

    #[test]
    fn walks_around_corners() {
        let scene = scene_with(
            r#"{"kind": "vehicle", "polyline": [[0,0],[10,0],[10,10]], "speed": 1, "count": 1, "phase_spread": 0}"#,
        );
        let t = Utc.timestamp_opt(13, 0).unwrap();
        let a = agent_positions(&scene, &t, 0)[0];
        assert!((a.position[0] - 10.0).abs() < 1e-12);
        assert!((a.position[1] - 3.0).abs() < 1e-12);
        assert_eq!(a.heading_deg, 90.0);
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let scene = scene_with(
            r#"{"kind": "person", "polyline": [[0,0],[50,0],[50,50]], "speed": 1.4, "count": 8, "phase_spread": 1}"#,
        );
        let t = Utc.with_ymd_and_hms(2024, 6, 21, 18, 30, 0).unwrap();
        assert_eq!(agent_positions(&scene, &t, 5), agent_positions(&scene, &t, 5));
        assert_ne!(agent_positions(&scene, &t, 5), agent_positions(&scene, &t, 6));
    }
}
