//! Fixed 17-significant-digit number output for CSV and JSON.

use serde::Serializer;
use serde_json::value::RawValue;

/// Formats `x` with 17 significant digits in scientific notation, which
/// round-trips every finite `f64`. Non-finite values print as `NaN`/`inf`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// `serialize_with` helper emitting a JSON number with 17 significant digits
/// (`null` for non-finite values).
pub fn serialize_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        let raw = RawValue::from_string(sig17(*x)).map_err(serde::ser::Error::custom)?;
        s.serialize_some(&raw)
    } else {
        s.serialize_none()
    }
}

pub fn serialize_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_vec_f64<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&Sig17(*x))?;
    }
    seq.end()
}

pub fn serialize_matrix<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in rows {
        seq.serialize_element(&Sig17Row(r))?;
    }
    seq.end()
}

/// Newtype that serialises an `f64` through [`serialize_f64`].
#[derive(Clone, Copy, Debug)]
pub struct Sig17(pub f64);

impl serde::Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_f64(&self.0, s)
    }
}

struct Sig17Row<'a>(&'a [f64]);

impl serde::Serialize for Sig17Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_vec_f64(self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -2.5e-300, 12.0 * 9.869604401089358] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn json_numbers_use_sig17() {
        #[derive(serde::Serialize)]
        struct W {
            #[serde(serialize_with = "serialize_f64")]
            x: f64,
            #[serde(serialize_with = "serialize_f64")]
            y: f64,
        }
        let s = serde_json::to_string(&W { x: 0.1, y: f64::NAN }).unwrap();
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"y":null}"#);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64().unwrap(), 0.1);
    }
}
