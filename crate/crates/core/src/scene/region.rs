use super::ReachableRegion;

/// True iff (x, y) lies in any rectangle and z lies in the height range.
/// All bounds are closed.
pub fn is_reachable(region: &ReachableRegion, p: [f64; 3]) -> bool {
    let [zmin, zmax] = region.height_range;
    p[2] >= zmin && p[2] <= zmax && region.rects.iter().any(|r| r.contains(p[0], p[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Rect;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn region() -> ReachableRegion {
        ReachableRegion {
            rects: vec![
                Rect { x_min: 0.0, x_max: 10.0, y_min: 0.0, y_max: 5.0 },
                Rect { x_min: -20.0, x_max: -15.0, y_min: -3.0, y_max: 30.0 },
            ],
            height_range: [1.5, 12.0],
        }
    }

    #[test]
    fn corner_at_min_height_is_inside() {
        assert!(is_reachable(&region(), [0.0, 0.0, 1.5]));
        assert!(is_reachable(&region(), [-15.0, 30.0, 12.0]));
    }

    #[test]
    fn above_max_height_is_outside() {
        assert!(!is_reachable(&region(), [5.0, 2.0, 12.0001]));
        assert!(!is_reachable(&region(), [5.0, 2.0, 1.4999]));
    }

    #[test]
    fn matches_brute_force_on_random_points() {
        let r = region();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = [
                rng.random_range(-25.0..15.0),
                rng.random_range(-5.0..35.0),
                rng.random_range(0.0..14.0),
            ];
            let mut inside_any = false;
            for rect in &r.rects {
                let in_x = !(p[0] < rect.x_min) && !(p[0] > rect.x_max);
                let in_y = !(p[1] < rect.y_min) && !(p[1] > rect.y_max);
                inside_any |= in_x && in_y;
            }
            let expected = inside_any && !(p[2] < 1.5) && !(p[2] > 12.0);
            assert_eq!(is_reachable(&r, p), expected, "{p:?}");
        }
    }
}
