//! Deterministic JSON rendering: keys sorted, floats with 17 significant
//! digits, non-finite values as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::fmt::Write as _;

use serde::Serialize;
use serde_value::Value;

use crate::error::{Error, Result};

pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "\"nan\"".into()
    } else if v.is_infinite() {
        if v > 0.0 { "\"inf\"" } else { "\"-inf\"" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn key(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Char(c) => c.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::U8(x) => x.to_string(),
        Value::U16(x) => x.to_string(),
        Value::U32(x) => x.to_string(),
        Value::U64(x) => x.to_string(),
        Value::I8(x) => x.to_string(),
        Value::I16(x) => x.to_string(),
        Value::I32(x) => x.to_string(),
        Value::I64(x) => x.to_string(),
        Value::F32(x) => format!("{:.16e}", *x as f64),
        Value::F64(x) => format!("{x:.16e}"),
        other => format!("{other:?}"),
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Unit | Value::Option(None) => out.push_str("null"),
        Value::Option(Some(x)) | Value::Newtype(x) => render(x, depth, out),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::U8(x) => out.push_str(&x.to_string()),
        Value::U16(x) => out.push_str(&x.to_string()),
        Value::U32(x) => out.push_str(&x.to_string()),
        Value::U64(x) => out.push_str(&x.to_string()),
        Value::I8(x) => out.push_str(&x.to_string()),
        Value::I16(x) => out.push_str(&x.to_string()),
        Value::I32(x) => out.push_str(&x.to_string()),
        Value::I64(x) => out.push_str(&x.to_string()),
        Value::F32(x) => out.push_str(&format_f64(*x as f64)),
        Value::F64(x) => out.push_str(&format_f64(*x)),
        Value::Char(c) => out.push_str(&quote(&c.to_string())),
        Value::String(s) => out.push_str(&quote(s)),
        Value::Bytes(b) => {
            let items: Vec<Value> = b.iter().map(|x| Value::U8(*x)).collect();
            render(&Value::Seq(items), depth, out)
        }
        Value::Seq(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                render(x, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(depth));
        }
        Value::Map(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut entries: Vec<(String, &Value)> = map.iter().map(|(k, v)| (key(k), v)).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            out.push_str("{\n");
            for (i, (k, x)) in entries.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(depth + 1), quote(k));
                render(x, depth + 1, out);
                out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(depth));
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_value::to_value(value).map_err(|e| Error::Io(format!("cannot serialize report: {e}")))?;
    let mut out = String::new();
    render(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

/// Report envelope written by every pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub passed: bool,
    /// Names of the records whose invariant or bound failed.
    pub violations: Vec<String>,
    pub result: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[derive(Serialize)]
    struct Sample {
        zeta: f64,
        alpha: Option<f64>,
        items: Vec<u32>,
        table: HashMap<String, f64>,
    }

    #[test]
    fn keys_are_sorted_and_floats_fixed() {
        let mut table = HashMap::new();
        table.insert("b".to_string(), 0.1);
        table.insert("a".to_string(), f64::INFINITY);
        let s = to_json(&Sample {
            zeta: 1.0 / 3.0,
            alpha: None,
            items: vec![1, 2],
            table,
        })
        .unwrap();
        let a = s.find("\"alpha\"").unwrap();
        let z = s.find("\"zeta\"").unwrap();
        assert!(a < z);
        assert!(s.contains("3.3333333333333331e-1"));
        assert!(s.contains("\"a\": \"inf\""));
        let parsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["items"][1], 2);
        assert!((parsed["table"]["b"].as_f64().unwrap() - 0.1).abs() < 1e-17);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 7.0, 6.02214076e23, -2.5e-300] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_f64(f64::NAN), "\"nan\"");
    }
}
