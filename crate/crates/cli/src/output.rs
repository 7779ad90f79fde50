use serde_json::{json, Map, Number, Value};

use crate::args::Cli;

pub const SCHEMA: u64 = 1;
const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds every float in the tree to twelve significant digits.
pub fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
                .parse()
                .expect("formatted float parses");
            // normalise -0
            let r = if r == 0.0 { 0.0 } else { r };
            Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_numbers).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, round_numbers(v)))
                .collect::<Map<String, Value>>(),
        ),
        other => other,
    }
}

pub fn render(cli: &Cli, result: Value) -> String {
    let config = serde_json::to_value(cli).expect("configuration serialises");
    let report = json!({
        "schema": SCHEMA,
        "tool": "commbound",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "config": config,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&round_numbers(report)).expect("report serialises");
    text.push('\n');
    text
}
