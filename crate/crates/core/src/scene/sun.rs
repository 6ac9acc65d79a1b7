use chrono::{Datelike, Timelike};
use serde::{Deserialize, Serialize};

use super::GeoReference;
use crate::time::Timestamp;

/// Sun position and the illumination derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunState {
    /// Unit vector toward the sun in the scene frame.
    pub direction: [f64; 3],
    pub elevation_deg: f64,
    /// Compass azimuth, 0 = North, clockwise.
    pub azimuth_deg: f64,
    pub irradiance: f64,
    pub warmth: f64,
}

const OBLIQUITY_DEG: f64 = 23.44;
const TWILIGHT_FLOOR: f64 = 0.08;
const TWILIGHT_DEPTH_DEG: f64 = 6.0;
const WARM_BELOW_DEG: f64 = 30.0;

/// Solar declination for a 1-based day of the year.
pub fn declination_deg(day_of_year: u32) -> f64 {
    OBLIQUITY_DEG * (2.0 * std::f64::consts::PI * (284.0 + f64::from(day_of_year)) / 365.0).sin()
}

/// Apparent minus mean solar time in minutes (Spencer's Fourier series).
pub fn equation_of_time_min(day_of_year: u32, utc_hours: f64) -> f64 {
    let g = 2.0 * std::f64::consts::PI / 365.0 * (f64::from(day_of_year) - 1.0 + (utc_hours - 12.0) / 24.0);
    229.18
        * (0.000075 + 0.001868 * g.cos() - 0.032077 * g.sin() - 0.014615 * (2.0 * g).cos()
            - 0.040849 * (2.0 * g).sin())
}

/// Apparent local solar hour: UTC offset by longitude and the equation of time.
pub fn solar_hour(georef: &GeoReference, t: &Timestamp) -> f64 {
    let utc_hours = f64::from(t.hour())
        + f64::from(t.minute()) / 60.0
        + (f64::from(t.second()) + f64::from(t.nanosecond()) * 1e-9) / 3600.0;
    utc_hours + georef.lon0 / 15.0 + equation_of_time_min(t.ordinal(), utc_hours) / 60.0
}

pub fn sun_state(georef: &GeoReference, t: &Timestamp) -> SunState {
    let decl = declination_deg(t.ordinal()).to_radians();
    let lat = georef.lat0.to_radians();
    let hour_angle = (15.0 * (solar_hour(georef, t) - 12.0)).to_radians();

    let sin_el = (lat.sin() * decl.sin() + lat.cos() * decl.cos() * hour_angle.cos()).clamp(-1.0, 1.0);
    let el = sin_el.asin();
    let elevation_deg = el.to_degrees();

    // cos(el)·sin(Az) = -cos(δ)·sin(H): afternoon (H > 0) puts the sun west
    let east = -decl.cos() * hour_angle.sin();
    let north = decl.sin() * lat.cos() - decl.cos() * lat.sin() * hour_angle.cos();
    let azimuth_deg = if east.abs() < 1e-12 && north.abs() < 1e-12 {
        // sun at the zenith: azimuth is undefined, pick south
        180.0
    } else {
        east.atan2(north).to_degrees().rem_euclid(360.0)
    };

    // compass bearing -> counterclockwise angle from the scene +x axis
    let planar = (georef.heading_deg - azimuth_deg).to_radians();
    let direction = [el.cos() * planar.cos(), el.cos() * planar.sin(), sin_el];

    let direct = sin_el.clamp(0.0, 1.0);
    let twilight = ((elevation_deg + TWILIGHT_DEPTH_DEG) / TWILIGHT_DEPTH_DEG).clamp(0.0, 1.0);
    let irradiance = direct + TWILIGHT_FLOOR * twilight * (1.0 - direct);
    let warmth = if elevation_deg >= 0.0 {
        (1.0 - elevation_deg / WARM_BELOW_DEG).clamp(0.0, 1.0)
    } else {
        0.0
    };

    SunState {
        direction,
        elevation_deg,
        azimuth_deg,
        irradiance,
        warmth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, TimeZone, Utc};

    fn georef(lat0: f64, lon0: f64, heading_deg: f64) -> GeoReference {
        GeoReference {
            lat0,
            lon0,
            alt0: 0.0,
            heading_deg,
        }
    }

    /// UTC instant of apparent solar noon at longitude 0.
    fn noon_utc(y: i32, m: u32, d: u32) -> Timestamp {
        let midnight = Utc.with_ymd_and_hms(y, m, d, 0, 0, 0).unwrap();
        let mut t = midnight + Duration::hours(12);
        for _ in 0..4 {
            let hour = solar_hour(&georef(0.0, 0.0, 0.0), &t);
            t -= Duration::nanoseconds(((hour - 12.0) * 3.6e12).round() as i64);
        }
        t
    }

    #[test]
    fn equation_of_time_known_values() {
        // early November the sun runs about 16 minutes fast, mid February 14 slow
        assert!((equation_of_time_min(307, 12.0) - 16.4).abs() < 0.3);
        assert!((equation_of_time_min(42, 12.0) + 14.2).abs() < 0.3);
        assert!(equation_of_time_min(105, 12.0).abs() < 0.5);
    }

    #[test]
    fn zenith_over_equator_at_equinox_noon() {
        // day 81 is where the declination formula crosses zero
        let t = noon_utc(2023, 3, 22);
        assert_eq!(t.ordinal(), 81);
        let s = sun_state(&georef(0.0, 0.0, 0.0), &t);
        assert!((s.elevation_deg - 90.0).abs() < 1e-6, "{}", s.elevation_deg);
        assert!((s.irradiance - 1.0).abs() < 1e-9);
        assert_eq!(s.warmth, 0.0);
    }

    #[test]
    fn forty_north_solstice_noon() {
        let t = noon_utc(2023, 6, 21);
        let s = sun_state(&georef(40.0, 0.0, 0.0), &t);
        // el = 90 - lat + decl
        assert!((s.elevation_deg - 73.44).abs() < 1e-3, "{}", s.elevation_deg);
        assert!((s.azimuth_deg - 180.0).abs() < 1e-6);
    }

    #[test]
    fn forty_north_equinox_midnight_is_below_horizon() {
        let t = Utc.with_ymd_and_hms(2023, 3, 22, 0, 0, 0).unwrap();
        let s = sun_state(&georef(40.0, 0.0, 0.0), &t);
        assert!(s.elevation_deg < 0.0);
        assert_eq!(s.warmth, 0.0);
        assert_eq!(s.irradiance, 0.0);
    }

    #[test]
    fn longitude_shifts_solar_noon() {
        // 90 deg east: solar noon at 06:00 UTC
        let t = Utc.with_ymd_and_hms(2023, 6, 21, 6, 0, 0).unwrap();
        let s = sun_state(&georef(40.0, 90.0, 0.0), &t);
        assert!((s.elevation_deg - 73.44).abs() < 0.5);
    }

    #[test]
    fn direction_is_unit_and_matches_azimuth() {
        let t0 = Utc.with_ymd_and_hms(2023, 9, 10, 0, 0, 0).unwrap();
        for heading in [0.0, 37.0, 90.0, 270.0] {
            for minutes in (0..1440).step_by(37) {
                let t = t0 + Duration::minutes(minutes);
                let s = sun_state(&georef(35.0, 10.0, heading), &t);
                let d = s.direction;
                let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                assert!((norm - 1.0).abs() < 1e-9);
                assert!((d[2] - s.elevation_deg.to_radians().sin()).abs() < 1e-12);
                // morning sun is east of the meridian
                let east_of_meridian = s.azimuth_deg < 180.0;
                let before_noon = (solar_hour(&georef(35.0, 10.0, 0.0), &t) - 12.0).rem_euclid(24.0) > 12.0;
                if (s.azimuth_deg - 180.0).abs() > 1e-6 && s.azimuth_deg > 1e-6 {
                    assert_eq!(east_of_meridian, before_noon, "t={minutes}");
                }
            }
        }
    }

    #[test]
    fn north_heading_maps_east_sun_to_minus_y() {
        // +x = North, +y = West, so an eastern sun has negative y
        let t = Utc.with_ymd_and_hms(2023, 3, 22, 7, 0, 0).unwrap();
        let s = sun_state(&georef(0.0, 0.0, 0.0), &t);
        assert!(s.azimuth_deg > 0.0 && s.azimuth_deg < 180.0);
        assert!(s.direction[1] < 0.0);
    }

    #[test]
    fn twilight_floor_and_warmth() {
        let g = georef(40.0, 0.0, 0.0);
        let base = Utc.with_ymd_and_hms(2023, 6, 21, 0, 0, 0).unwrap();
        for minutes in 0..1440 {
            let s = sun_state(&g, &(base + Duration::minutes(minutes)));
            let el = s.elevation_deg;
            let direct = el.to_radians().sin().clamp(0.0, 1.0);
            let expected = direct + 0.08 * ((el + 6.0) / 6.0).clamp(0.0, 1.0) * (1.0 - direct);
            assert!((s.irradiance - expected).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&s.irradiance));
            if el >= 0.0 {
                assert!((s.warmth - (1.0 - el / 30.0).clamp(0.0, 1.0)).abs() < 1e-12);
            } else {
                assert_eq!(s.warmth, 0.0);
            }
        }
    }

    #[test]
    fn elevation_peaks_at_solar_noon() {
        let g = georef(52.0, 0.0, 0.0);
        let base = Utc.with_ymd_and_hms(2023, 5, 3, 0, 0, 0).unwrap();
        let (best_minute, _) = (0..1440)
            .map(|m| (m, sun_state(&g, &(base + Duration::minutes(m))).elevation_deg))
            .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        // the sun runs about 3.3 minutes fast in early May
        assert_eq!(best_minute, 717);
    }

    #[test]
    fn one_day_periodicity_within_declination_drift() {
        let g = georef(-33.0, 151.0, 0.0);
        let base = Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap();
        for hours in (0..24 * 365).step_by(53) {
            let t = base + Duration::hours(hours);
            let a = sun_state(&g, &t).elevation_deg;
            let b = sun_state(&g, &(t + Duration::hours(24))).elevation_deg;
            assert!((a - b).abs() < 0.6, "t={t} {a} {b}");
        }
    }
}
