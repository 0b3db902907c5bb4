//! Deterministic JSON/CSV rendering.
//!
//! Floats are rounded to 12 significant digits before serialization and object
//! keys are sorted, so identical inputs give byte-identical reports.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::poly::Rational;

pub const SCHEMA_VERSION: u64 = 1;
pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Text form used in CSV files.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 {
        "0".into()
    } else if (1e-4..1e12).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn normalize(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let x = round_sig(n.as_f64().unwrap());
                *v = Number::from_f64(x).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(normalize),
        Value::Object(o) => o.values_mut().for_each(normalize),
        _ => {}
    }
}

/// Converts to a JSON value with rounded floats.
pub fn to_value<T: Serialize>(t: &T) -> Value {
    let mut v = serde_json::to_value(t).expect("report values serialize");
    normalize(&mut v);
    v
}

/// An ordered report under construction.
#[derive(Debug, Default)]
pub struct Report {
    root: Map<String, Value>,
    caveats: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.root.insert("schema".into(), Value::from(SCHEMA_VERSION));
        r.root.insert(
            "tool".into(),
            serde_json::json!({"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")}),
        );
        r.root.insert("command".into(), Value::from(command));
        r
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: &T) {
        self.root.insert(key.into(), to_value(value));
    }

    pub fn caveat(&mut self, c: impl Into<String>) {
        let c = c.into();
        if !self.caveats.contains(&c) {
            self.caveats.push(c);
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.root.get(key)
    }

    pub fn into_value(mut self) -> Value {
        self.root.insert("caveats".into(), Value::from(self.caveats));
        Value::Object(self.root)
    }

    pub fn to_json(self) -> String {
        let mut s = serde_json::to_string_pretty(&self.into_value()).expect("json");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(fmt_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_float(1e-30 / 3.0), "3.33333333333e-31");
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn report_is_sorted_and_rounded() {
        let mut r = Report::new("test");
        r.set("zeta", &vec![0.1 + 0.2]);
        r.set("alpha", &1.0f64);
        r.caveat("c");
        r.caveat("c");
        let s = r.to_json();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.contains("0.3"));
        assert!(!s.contains("0.30000000000000004"));
        assert_eq!(s.matches("\"c\"").count(), 1);
    }
}
