//! Scalar formats: `a+bi` parsing and 12-significant-digit output.

use flucmo_core::C64;
use serde::{Deserialize, Serialize};

/// Significant digits of every floating-point output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Parses `a+bi`, `bi`, `a`, `-i`, with optional surrounding whitespace.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    s.trim().parse::<C64>().map_err(|_| format!("cannot parse {s:?} as a complex number a+bi"))
}

/// Parses a comma-separated list of complex numbers.
pub fn parse_complex_list(s: &str) -> Result<Vec<C64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_complex).collect()
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// A complex number as a JSON object `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        JsonComplex {
            re: round_sig(z.re),
            im: round_sig(z.im),
        }
    }
}

/// `a+bi` with [`SIGNIFICANT_DIGITS`] digits.
pub fn format_complex(z: C64) -> String {
    let (re, im) = (round_sig(z.re), round_sig(z.im));
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}
