//! Output records and exact serializers for counts and rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use std::io::{self, Write};

use serde::{Serialize, Serializer};
use serde_json::Value;

pub fn biguint_string<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn bigint_string<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn bigrational_string<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One line of JSON output.
#[derive(Serialize)]
pub struct Record<'a> {
    pub schema_version: u32,
    pub subcommand: super::Command,
    pub inputs: &'a Value,
    pub outputs: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Quotes a CSV field when it holds a comma, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// `path: value` lines for every scalar under `v`; arrays of scalars stay on one line.
pub fn write_text(w: &mut impl Write, path: &str, v: &Value) -> io::Result<()> {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_owned()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => map.iter().try_for_each(|(k, x)| write_text(w, &join(k), x)),
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => items
            .iter()
            .enumerate()
            .try_for_each(|(i, x)| write_text(w, &join(&i.to_string()), x)),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            writeln!(w, "{path}: [{}]", parts.join(", "))
        }
        _ => writeln!(w, "{path}: {}", scalar(v)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
