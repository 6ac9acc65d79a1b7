//! UTC timestamps and the fixed-point arithmetic used for frame schedules.

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};

pub type Timestamp = DateTime<Utc>;

/// Renders `t` as `2024-06-21T12:00:00Z`, with fractional seconds only when present.
pub fn format_timestamp(t: &Timestamp) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

pub fn parse_timestamp(text: &str) -> Option<Timestamp> {
    DateTime::parse_from_rfc3339(text)
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

/// Seconds elapsed since the Unix epoch, as a float.
pub fn epoch_seconds(t: &Timestamp) -> f64 {
    t.timestamp() as f64 + f64::from(t.timestamp_subsec_nanos()) * 1e-9
}

pub(crate) fn nanos_since_epoch(t: &Timestamp) -> i128 {
    i128::from(t.timestamp()) * 1_000_000_000 + i128::from(t.timestamp_subsec_nanos())
}

pub(crate) fn from_nanos(ns: i128) -> Timestamp {
    let secs = ns.div_euclid(1_000_000_000) as i64;
    let sub = ns.rem_euclid(1_000_000_000) as u32;
    Utc.timestamp_opt(secs, sub)
        .single()
        .expect("timestamp within chrono's range")
}

/// `start + (end - start) * num / den`, exact to the nanosecond (floor).
pub(crate) fn lerp_time(start: &Timestamp, end: &Timestamp, num: u64, den: u64) -> Timestamp {
    let a = nanos_since_epoch(start);
    let b = nanos_since_epoch(end);
    let span = b - a;
    from_nanos(a + (span * i128::from(num)).div_euclid(i128::from(den.max(1))))
}

/// Serde adapter pinning the ISO-8601 `Z` form.
pub mod iso {
    use super::{format_timestamp, parse_timestamp, Timestamp};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &Timestamp, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_timestamp(t))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Timestamp, D::Error> {
        let text = String::deserialize(d)?;
        parse_timestamp(&text)
            .ok_or_else(|| de::Error::custom(format!("invalid ISO-8601 timestamp `{text}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_whole_seconds_with_z() {
        let t = Utc.with_ymd_and_hms(2024, 6, 21, 12, 0, 0).unwrap();
        assert_eq!(format_timestamp(&t), "2024-06-21T12:00:00Z");
        assert_eq!(parse_timestamp("2024-06-21T12:00:00Z"), Some(t));
    }

    #[test]
    fn lerp_time_hits_endpoints() {
        let a = Utc.with_ymd_and_hms(2024, 6, 21, 6, 0, 0).unwrap();
        let b = Utc.with_ymd_and_hms(2024, 6, 21, 8, 0, 0).unwrap();
        assert_eq!(lerp_time(&a, &b, 0, 7), a);
        assert_eq!(lerp_time(&a, &b, 7, 7), b);
        assert_eq!(
            lerp_time(&a, &b, 1, 2),
            Utc.with_ymd_and_hms(2024, 6, 21, 7, 0, 0).unwrap()
        );
    }
}
