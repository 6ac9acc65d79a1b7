//! Single-bounce ray caster over the ground, solid boxes and agent boxes.

use glam::DVec3;

use crate::scene::{AgentKind, AgentPlacement, Ground, SceneDescription, SunState};

use super::CameraPose;

const SUN_WEIGHT: f64 = 0.75;
const AMBIENT_WEIGHT: f64 = 0.25;
const WARM_TINT: [f64; 3] = [1.0, 0.78, 0.55];
const HAZE_COLOR: [f64; 3] = [0.72, 0.76, 0.84];
/// Distance over which haze 1.0 attenuates to 1/e.
const FOG_SCALE_M: f64 = 900.0;
const MAX_RAY_M: f64 = 20_000.0;
const SHADOW_BIAS: f64 = 1e-4;

/// Box in the scene, possibly rotated about +z.
#[derive(Debug, Clone, Copy)]
struct SceneBox {
    center: DVec3,
    half: DVec3,
    /// cos / sin of the rotation about z; (1, 0) for axis-aligned solids.
    rot: (f64, f64),
    albedo: DVec3,
}

struct Hit {
    t: f64,
    normal: DVec3,
    albedo: DVec3,
}

impl SceneBox {
    fn intersect(&self, origin: DVec3, dir: DVec3) -> Option<(f64, DVec3)> {
        let (c, s) = self.rot;
        let rel = origin - self.center;
        // world -> local: rotate by -angle
        let o = DVec3::new(c * rel.x + s * rel.y, -s * rel.x + c * rel.y, rel.z);
        let d = DVec3::new(c * dir.x + s * dir.y, -s * dir.x + c * dir.y, dir.z);
        let mut t_near = f64::NEG_INFINITY;
        let mut t_far = f64::INFINITY;
        let mut axis = 0;
        let mut sign = 1.0;
        for k in 0..3 {
            let (ok, dk, hk) = (o[k], d[k], self.half[k]);
            if dk.abs() < 1e-15 {
                if ok.abs() > hk {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / dk;
            let mut t0 = (-hk - ok) * inv;
            let mut t1 = (hk - ok) * inv;
            let mut entry_sign = -1.0;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
                entry_sign = 1.0;
            }
            if t0 > t_near {
                t_near = t0;
                axis = k;
                sign = entry_sign;
            }
            t_far = t_far.min(t1);
            if t_near > t_far {
                return None;
            }
        }
        if t_far < 0.0 || t_near < 0.0 {
            // behind the ray, or the origin is inside the box
            return None;
        }
        let mut local_n = DVec3::ZERO;
        local_n[axis] = sign;
        let n = DVec3::new(c * local_n.x - s * local_n.y, s * local_n.x + c * local_n.y, local_n.z);
        Some((t_near, n))
    }
}

/// Per-frame render context: geometry plus lighting at one instant.
pub(crate) struct Tracer<'a> {
    scene: &'a SceneDescription,
    boxes: Vec<SceneBox>,
    sun: SunState,
    sun_dir: DVec3,
    shadows: bool,
    zenith: DVec3,
    horizon: DVec3,
    max_ground: f64,
}

impl<'a> Tracer<'a> {
    pub(crate) fn new(
        scene: &'a SceneDescription,
        sun: SunState,
        agents: &[AgentPlacement],
        shadows: bool,
    ) -> Self {
        let mut boxes: Vec<SceneBox> = scene
            .solids
            .iter()
            .map(|s| SceneBox {
                center: DVec3::from_array(s.center),
                half: DVec3::from_array(s.size) * 0.5,
                rot: (1.0, 0.0),
                albedo: DVec3::from_array(s.albedo),
            })
            .collect();
        for a in agents {
            let (size, albedo) = match a.kind {
                AgentKind::Person => ([0.6, 0.6, 1.8], [0.62, 0.32, 0.26]),
                AgentKind::Vehicle => ([4.5, 1.9, 1.5], [0.18, 0.28, 0.62]),
            };
            let ground = scene.ground.height_at(a.position[0], a.position[1]);
            let heading = a.heading_deg.to_radians();
            boxes.push(SceneBox {
                center: DVec3::new(a.position[0], a.position[1], ground + size[2] / 2.0),
                half: DVec3::from_array(size) * 0.5,
                rot: (heading.cos(), heading.sin()),
                albedo: DVec3::from_array(albedo),
            });
        }

        let irr = sun.irradiance;
        let day = DVec3::from_array(scene.sky.day_zenith);
        let night = DVec3::from_array(scene.sky.night_zenith);
        let zenith = night + (day - night) * irr;
        let warm = DVec3::from_array(WARM_TINT);
        let haze_tint = DVec3::ONE.lerp(warm, sun.warmth * 0.8);
        let haze_color = DVec3::from_array(HAZE_COLOR) * haze_tint * irr.max(night.max_element());
        let horizon = zenith.lerp(haze_color, 0.35 + 0.65 * scene.sky.haze);

        let max_ground = match &scene.ground {
            Ground::Flat { .. } => 0.0,
            Ground::Heightfield { elevations, .. } => {
                elevations.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        };

        Tracer {
            scene,
            boxes,
            sun,
            sun_dir: DVec3::from_array(sun.direction),
            shadows,
            zenith,
            horizon,
            max_ground,
        }
    }

    pub(crate) fn sky(&self, dir: DVec3) -> DVec3 {
        let up = dir.z.max(0.0);
        let mut c = self.horizon.lerp(self.zenith, up.sqrt());
        if self.sun.elevation_deg > -2.0 {
            let glow = dir.dot(self.sun_dir).max(0.0).powi(48);
            let tint = DVec3::ONE.lerp(DVec3::from_array(WARM_TINT), self.sun.warmth);
            c += tint * (0.6 * glow * self.sun.irradiance);
        }
        c
    }

    fn ground_hit(&self, origin: DVec3, dir: DVec3) -> Option<Hit> {
        let albedo = DVec3::from_array(self.scene.ground.albedo());
        match &self.scene.ground {
            Ground::Flat { .. } => {
                if dir.z >= 0.0 || origin.z <= 0.0 {
                    return None;
                }
                Some(Hit {
                    t: -origin.z / dir.z,
                    normal: DVec3::Z,
                    albedo,
                })
            }
            Ground::Heightfield { cell_size, .. } => {
                let g = &self.scene.ground;
                let above = |t: f64| {
                    let p = origin + dir * t;
                    p.z - g.height_at(p.x, p.y)
                };
                if above(0.0) <= 0.0 {
                    return None;
                }
                let base_step = cell_size / 4.0;
                let mut t_prev = 0.0;
                let mut t = base_step;
                while t < MAX_RAY_M {
                    let p = origin + dir * t;
                    if dir.z > 0.0 && p.z > self.max_ground {
                        return None;
                    }
                    if above(t) <= 0.0 {
                        let (mut lo, mut hi) = (t_prev, t);
                        for _ in 0..24 {
                            let mid = 0.5 * (lo + hi);
                            if above(mid) > 0.0 {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        let p = origin + dir * hi;
                        let e = cell_size * 0.05;
                        let dx = (g.height_at(p.x + e, p.y) - g.height_at(p.x - e, p.y)) / (2.0 * e);
                        let dy = (g.height_at(p.x, p.y + e) - g.height_at(p.x, p.y - e)) / (2.0 * e);
                        return Some(Hit {
                            t: hi,
                            normal: DVec3::new(-dx, -dy, 1.0).normalize(),
                            albedo,
                        });
                    }
                    t_prev = t;
                    t += base_step.max(t * 0.02);
                }
                None
            }
        }
    }

    fn closest_hit(&self, origin: DVec3, dir: DVec3) -> Option<Hit> {
        let mut best = self.ground_hit(origin, dir);
        for b in &self.boxes {
            if let Some((t, normal)) = b.intersect(origin, dir) {
                if best.as_ref().is_none_or(|h| t < h.t) {
                    best = Some(Hit {
                        t,
                        normal,
                        albedo: b.albedo,
                    });
                }
            }
        }
        best
    }

    fn occluded(&self, origin: DVec3) -> bool {
        self.boxes
            .iter()
            .any(|b| b.intersect(origin, self.sun_dir).is_some())
    }

    /// Linear RGB radiance along a camera ray.
    pub(crate) fn trace(&self, origin: DVec3, dir: DVec3) -> DVec3 {
        let Some(hit) = self.closest_hit(origin, dir) else {
            return self.sky(dir);
        };
        let irr = self.sun.irradiance;
        let cos_sun = hit.normal.dot(self.sun_dir).max(0.0);
        let mut direct = SUN_WEIGHT * cos_sun;
        if direct > 0.0 && self.shadows {
            let p = origin + dir * hit.t + hit.normal * SHADOW_BIAS;
            if self.occluded(p) {
                direct = 0.0;
            }
        }
        let tint = DVec3::ONE.lerp(DVec3::from_array(WARM_TINT), self.sun.warmth);
        let light = tint * direct + DVec3::splat(AMBIENT_WEIGHT);
        let surface = hit.albedo * light * irr;
        let haze = self.scene.sky.haze;
        if haze > 0.0 {
            let fog = 1.0 - (-hit.t * haze / FOG_SCALE_M).exp();
            surface.lerp(self.horizon, fog)
        } else {
            surface
        }
    }
}

/// Camera basis: forward, right and up unit vectors.
pub(crate) fn camera_basis(pose: &CameraPose) -> (DVec3, DVec3, DVec3) {
    let (sy, cy) = pose.yaw_deg.to_radians().sin_cos();
    let (sp, cp) = pose.pitch_deg.to_radians().sin_cos();
    let forward = DVec3::new(cp * cy, cp * sy, sp);
    let right = DVec3::new(sy, -cy, 0.0);
    let up = right.cross(forward);
    (forward, right, up)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal_and_right_handed() {
        for yaw in [0.0, 33.0, 90.0, 200.0] {
            for pitch in [-89.0, -20.0, 0.0, 45.0] {
                let pose = CameraPose {
                    position: [0.0; 3],
                    yaw_deg: yaw,
                    pitch_deg: pitch,
                    vfov_deg: 60.0,
                };
                let (f, r, u) = camera_basis(&pose);
                assert!((f.length() - 1.0).abs() < 1e-12);
                assert!((r.length() - 1.0).abs() < 1e-12);
                assert!((u.length() - 1.0).abs() < 1e-12);
                assert!(f.dot(r).abs() < 1e-12 && f.dot(u).abs() < 1e-12);
                assert!(u.z >= 0.0);
                assert!((r.cross(f) - u).length() < 1e-12);
            }
        }
    }

    #[test]
    fn rotated_box_hit_from_outside() {
        let b = SceneBox {
            center: DVec3::new(10.0, 0.0, 0.0),
            half: DVec3::new(2.0, 1.0, 1.0),
            rot: (0.0, 1.0), // 90 degrees: long axis along y
            albedo: DVec3::ONE,
        };
        let (t, n) = b.intersect(DVec3::ZERO, DVec3::X).unwrap();
        assert!((t - 9.0).abs() < 1e-12);
        assert!((n - DVec3::new(-1.0, 0.0, 0.0)).length() < 1e-12);
        assert!(b.intersect(DVec3::ZERO, -DVec3::X).is_none());
        assert!(b.intersect(DVec3::new(0.0, 3.0, 0.0), DVec3::X).is_none());
    }
}
