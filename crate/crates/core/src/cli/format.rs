//! Twelve-significant-digit output.

use serde_json::Value;

use crate::classify::Classification;

const SIG: i32 = 12;
/// Report components below this magnitude are rounding noise and print as zero.
pub const NOISE_FLOOR: f64 = 1e-14;

/// Fixed-point text with 12 significant digits: `0.693147180560`, and
/// `0.000000000000` for zero.
pub fn fmt_sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.*}", SIG as usize, 0.0);
    }
    let decimals = |v: f64| (SIG - 1 - v.abs().log10().floor() as i32).max(0) as usize;
    let d = decimals(x);
    let text = format!("{x:.d$}");
    // rounding can carry into a new leading digit (9.99… -> 10.0…)
    let rounded: f64 = text.parse().unwrap_or(x);
    let d2 = decimals(rounded);
    if d2 < d {
        format!("{x:.d2$}")
    } else {
        text
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", (SIG - 1) as usize, x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let clean = |x: f64| {
                    if x.abs() < NOISE_FLOOR {
                        0.0
                    } else {
                        round_sig12(x)
                    }
                };
                if let Some(r) = n.as_f64().map(clean).and_then(serde_json::Number::from_f64) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// The classification report with every float rounded to 12 significant digits
/// and noise below [`NOISE_FLOOR`] cleared.
pub fn classification_json(c: &Classification) -> Value {
    let mut v = serde_json::to_value(c).expect("classification serializes");
    round_value(&mut v);
    v
}
