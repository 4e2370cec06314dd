//! Quantities with explicit units, e.g. `"2e-4 cm^2/V/s"`.

use crate::error::{validation, Result};

/// Exponents of (m, s, V, K).
pub type Dimension = [i32; 4];

pub const LENGTH: Dimension = [1, 0, 0, 0];
pub const TIME: Dimension = [0, 1, 0, 0];
pub const VOLTAGE: Dimension = [0, 0, 1, 0];
pub const TEMPERATURE: Dimension = [0, 0, 0, 1];
pub const MOBILITY: Dimension = [2, -1, -1, 0];
pub const RATE: Dimension = [0, -1, 0, 0];
pub const DENSITY: Dimension = [-3, 0, 0, 0];
pub const GENERATION: Dimension = [-3, -1, 0, 0];
pub const RATE_CONSTANT: Dimension = [3, -1, 0, 0];
pub const VELOCITY: Dimension = [1, -1, 0, 0];
pub const FLUX: Dimension = [-2, -1, 0, 0];

fn base(sym: &str) -> Option<(f64, Dimension)> {
    Some(match sym {
        "1" => (1.0, [0; 4]),
        "m" => (1.0, LENGTH),
        "cm" => (1e-2, LENGTH),
        "mm" => (1e-3, LENGTH),
        "um" => (1e-6, LENGTH),
        "nm" => (1e-9, LENGTH),
        "s" => (1.0, TIME),
        "ms" => (1e-3, TIME),
        "us" => (1e-6, TIME),
        "ns" => (1e-9, TIME),
        "ps" => (1e-12, TIME),
        "V" => (1.0, VOLTAGE),
        "mV" => (1e-3, VOLTAGE),
        "K" => (1.0, TEMPERATURE),
        _ => return None,
    })
}

/// Scale to SI and dimension of a unit expression. Factors are separated by
/// spaces or `*`, each `/` divides by the next factor, and a factor may
/// carry an integer power `^k`.
pub fn parse_unit(expr: &str) -> std::result::Result<(f64, Dimension), String> {
    let mut scale = 1.0;
    let mut dim = [0; 4];
    let mut sign = 1;
    let mut seen = false;
    let spaced = expr.replace('/', " / ").replace('*', " ");
    for tok in spaced.split_whitespace() {
        if tok == "/" {
            if !seen || sign == -1 {
                return Err(format!("dangling '/' in unit `{expr}`"));
            }
            sign = -1;
            continue;
        }
        let (sym, pow) = match tok.split_once('^') {
            Some((s, p)) => (s, p.parse::<i32>().map_err(|_| format!("bad exponent in `{tok}`"))?),
            None => (tok, 1),
        };
        let (f, d) = base(sym).ok_or_else(|| format!("unknown unit `{sym}`"))?;
        let p = sign * pow;
        scale *= f.powi(p);
        for k in 0..4 {
            dim[k] += d[k] * p;
        }
        sign = 1;
        seen = true;
    }
    if !seen {
        return Err("missing unit".into());
    }
    if sign == -1 {
        return Err(format!("dangling '/' in unit `{expr}`"));
    }
    Ok((scale, dim))
}

/// Parse `"<number> <unit>"` and convert to SI, checking the dimension.
pub fn parse_quantity(text: &str, expected: Dimension, field: &str) -> Result<f64> {
    let text = text.trim();
    let (num, unit) = text
        .split_once(char::is_whitespace)
        .ok_or_else(|| validation(field, format!("`{text}` needs a value and a unit")))?;
    let value: f64 = num
        .parse()
        .map_err(|_| validation(field, format!("`{num}` is not a number")))?;
    let (scale, dim) = parse_unit(unit).map_err(|e| validation(field, e))?;
    if dim != expected {
        return Err(validation(field, format!("unit `{}` has the wrong dimension", unit.trim())));
    }
    if !value.is_finite() {
        return Err(validation(field, "must be finite"));
    }
    // every base unit is a power of ten; dividing by an exact 10^k keeps
    // "1.5 nm" equal to the literal 1.5e-9
    let e = scale.log10().round() as i32;
    if (-22..0).contains(&e) && (scale / 10f64.powi(e) - 1.0).abs() < 1e-12 {
        Ok(value / 10f64.powi(-e))
    } else {
        Ok(value * scale)
    }
}
