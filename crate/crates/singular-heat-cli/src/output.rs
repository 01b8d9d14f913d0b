//! Deterministic JSON and CSV writers with 17 significant digits.

use serde::Serialize;
use serde_json::ser::Formatter;
use singular_heat::asymfit::HeatContentSamples;
use std::io::{self, Write};
use std::path::Path;

/// Fixed 17-significant-digit rendering of a double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            w.write_all(fmt_f64(v).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    v.serialize(&mut ser).map_err(|e| e.to_string())?;
    String::from_utf8(buf).map_err(|e| e.to_string())
}

pub fn write_csv(path: &Path, samples: &HeatContentSamples) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    w.write_record(["t", "beta", "err"]).map_err(|e| e.to_string())?;
    for s in &samples.entries {
        w.write_record([fmt_f64(s.t), fmt_f64(s.beta), fmt_f64(s.err)])
            .map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5e-300), "-2.5000000000000000e-300");
        for v in [0.1, 1.0 / 3.0, 1e-17, 6.02e23, -7.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_uses_fixed_digits_and_null_for_non_finite() {
        let v = serde_json::json!({"a": [0.5, f64::NAN], "b": 3});
        assert_eq!(to_json(&v).unwrap(), r#"{"a":[5.0000000000000000e-1,null],"b":3}"#);
    }
}
