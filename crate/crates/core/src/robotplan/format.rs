//! Plan text format: pretty JSON whose numbers always carry at least nine
//! decimal places and parse back to the identical value.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::RobotPlan;
use crate::error::{Error, Result};

const MIN_DECIMALS: usize = 9;

struct PlanFormatter<'a>(PrettyFormatter<'a>);

/// Shortest round-trip decimal form, zero-padded to `MIN_DECIMALS`.
fn fixed_decimals(v: f64) -> String {
    let mut s = format!("{v}");
    let decimals = match s.find('.') {
        Some(dot) => s.len() - dot - 1,
        None => {
            s.push('.');
            0
        }
    };
    s.extend(std::iter::repeat_n('0', MIN_DECIMALS.saturating_sub(decimals)));
    s
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for PlanFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fixed_decimals(value).as_bytes())
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

pub fn serialize_plan(plan: &RobotPlan) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PlanFormatter(PrettyFormatter::new()));
    plan.serialize(&mut ser).expect("plan serializes");
    let mut text = String::from_utf8(out).expect("JSON is UTF-8");
    text.push('\n');
    text
}

pub fn deserialize_plan(text: &str) -> Result<RobotPlan> {
    let plan: RobotPlan = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    plan.validate()?;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::fixed_decimals;

    #[test]
    fn decimals_are_padded_not_rounded() {
        assert_eq!(fixed_decimals(12.0), "12.000000000");
        assert_eq!(fixed_decimals(0.001), "0.001000000");
        assert_eq!(fixed_decimals(-3.5), "-3.500000000");
        assert_eq!(fixed_decimals(1e-7), "0.000000100");
        let v = 39.904_200_123_456_78;
        assert_eq!(fixed_decimals(v).parse::<f64>().unwrap(), v);
    }
}
