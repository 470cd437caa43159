use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use toricabel::io::to_json;
use toricabel::numeric::CPoly;
use toricabel::{Cone, Result};

use crate::Cli;

pub struct Output {
    pub text: String,
    pub status: u8,
}

impl Output {
    pub fn new(cli: &Cli, report: Value, status: u8) -> Result<Output> {
        let text = if cli.json {
            let mut s = to_json(&report)?;
            s.push('\n');
            s
        } else {
            let mut s = String::new();
            text_lines(&report, 0, &mut s);
            s
        };
        Ok(Output { text, status })
    }
}

pub fn big(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

pub fn cone(c: &Cone) -> String {
    c.to_string()
}

/// Same layout as the `--curve` input.
pub fn poly(p: &CPoly) -> Value {
    json!({
        "coeffs": p.terms.iter().map(|(e, c)| json!([e, c.re, c.im])).collect::<Vec<_>>()
    })
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => format!("{x:.6e}"),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object()) => Some(format!(
            "[{}]",
            a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn text_lines(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_lines(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}- [{i}]\n"));
                        text_lines(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

pub fn error_report(e: &toricabel::Error, code: u8) -> String {
    let mut s = to_json(&json!({"error": e.to_string(), "exit_code": code})).unwrap_or_default();
    s.push('\n');
    s
}
