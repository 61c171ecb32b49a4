//! Deterministic number formatting and table output.

use serde_json::{Map, Value};
use std::io::Write;

pub const FORMAT_VERSION: u32 = 1;

const SIG: usize = 12;

/// C-style `%.12g`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", SIG - 1, x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= SIG as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    } else {
        let decimals = (SIG as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to 12 significant digits so JSON output matches the CSV text.
pub fn round_g(x: f64) -> f64 {
    if x.is_finite() {
        fmt_g(x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// Applies [`round_g`] to every float in a JSON tree; `-0` becomes `0`.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_g(n.as_f64().unwrap()) + 0.0;
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A rectangular numeric table with named columns.
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Fixed parameters echoed into the JSON envelope.
    pub parameters: Map<String, Value>,
}

impl Table {
    pub fn write<W: Write>(&self, out: &mut W, format: Format) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "# qsym3 {} format-version={FORMAT_VERSION}", self.command)?;
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|&x| fmt_g(x + 0.0)).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
                Ok(())
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(r.iter())
                            .map(|(k, &x)| (k.to_string(), Value::from(x)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = serde_json::json!({
                    "format_version": FORMAT_VERSION,
                    "command": self.command,
                    "parameters": Value::Object(self.parameters.clone()),
                    "columns": self.columns,
                    "rows": rows,
                });
                write_json(out, doc)
            }
        }
    }
}

pub fn write_json<W: Write>(out: &mut W, doc: Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, &round_json(doc))?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt_g(2.0), "2");
        assert_eq!(fmt_g(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(1e-5), "1e-05");
        assert_eq!(fmt_g(-1.25e-7), "-1.25e-07");
        assert_eq!(fmt_g(123456789012.0), "123456789012");
        assert_eq!(fmt_g(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(0.99999999999999), "1");
        assert_eq!(fmt_g(0.0), "0");
    }

    #[test]
    fn json_rounding() {
        let v = round_json(serde_json::json!({"a": [0.1 + 0.2, 1], "b": -0.0}));
        assert_eq!(v.to_string(), r#"{"a":[0.3,1],"b":0.0}"#);
    }
}
