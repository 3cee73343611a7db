//! Deterministic float serialization: 17 significant digits, non-finite values as strings.

use serde::ser::{SerializeSeq, Serializer};
use std::str::FromStr;

pub fn format(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub fn sci<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        let n = serde_json::Number::from_str(&format(*v)).map_err(serde::ser::Error::custom)?;
        s.serialize_some(&n)
    } else {
        s.serialize_str(&format(*v))
    }
}

pub fn sci_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => sci(x, s),
        None => s.serialize_none(),
    }
}

struct Sci(f64);

impl serde::Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        sci(&self.0, s)
    }
}

pub fn sci_vec<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &x in v {
        seq.serialize_element(&Sci(x))?;
    }
    seq.end()
}
