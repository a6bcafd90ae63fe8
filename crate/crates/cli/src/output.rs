//! Report rendering and delivery: JSON carries full precision, text rounds
//! to 12 significant digits, and either stream goes to stdout or `--out`.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Pretty-printed JSON with full-precision numbers.
    Json,
    /// Human-readable lines, numbers rounded to 12 significant digits.
    Text,
}

/// One finished command: the machine report, the human report, and whether
/// a mathematical violation was found (exit code 1).
pub struct Outcome {
    pub json: serde_json::Value,
    pub text: String,
    pub violation: bool,
}

/// `x` at 12 significant digits, fixed notation for moderate magnitudes and
/// scientific otherwise, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        let s = format!("{x:.11e}");
        // Trim trailing zeros of the mantissa: 1.20000000000e-7 -> 1.2e-7.
        match s.split_once('e') {
            Some((mant, e)) => {
                let mant = mant.trim_end_matches('0').trim_end_matches('.');
                format!("{mant}e{e}")
            }
            None => s,
        }
    }
}

pub fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = outcome.text.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
    }
}

pub fn deliver(rendered: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, rendered),
        None => std::io::stdout().write_all(rendered.as_bytes()),
    }
}
