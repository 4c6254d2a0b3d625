//! Fixed-point time.
//!
//! Every duration in the model (execution times, interarrival bounds,
//! connection delays, latency specs) is held as an integer number of
//! nanoseconds. Decimal literals in the DSL convert exactly, so printing and
//! re-parsing a model never drifts.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

pub const NANOS_PER_SEC: u64 = 1_000_000_000;
pub const NANOS_PER_MILLI: u64 = 1_000_000;

/// A non-negative duration or instant in nanoseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nanos(pub u64);

impl Nanos {
    pub const ZERO: Nanos = Nanos(0);

    pub fn from_secs_f64(secs: f64) -> Nanos {
        Nanos((secs * NANOS_PER_SEC as f64).round().max(0.0) as u64)
    }

    pub fn from_millis(ms: u64) -> Nanos {
        Nanos(ms * NANOS_PER_MILLI)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC as f64
    }

    pub fn saturating_sub(self, rhs: Nanos) -> Nanos {
        Nanos(self.0.saturating_sub(rhs.0))
    }

    /// Render as an exact decimal number of `unit` (e.g. `NANOS_PER_MILLI`).
    pub fn to_decimal(self, unit: u64) -> String {
        let int = self.0 / unit;
        let frac = self.0 % unit;
        if frac == 0 {
            return int.to_string();
        }
        let width = unit.to_string().len() - 1;
        let digits = format!("{frac:0width$}");
        format!("{int}.{}", digits.trim_end_matches('0'))
    }
}

impl Add for Nanos {
    type Output = Nanos;
    fn add(self, rhs: Nanos) -> Nanos {
        Nanos(self.0 + rhs.0)
    }
}

impl Sub for Nanos {
    type Output = Nanos;
    fn sub(self, rhs: Nanos) -> Nanos {
        Nanos(self.0 - rhs.0)
    }
}

impl fmt::Display for Nanos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} s", self.to_decimal(NANOS_PER_SEC))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecimalError {
    #[error("not a decimal number")]
    Malformed,
    /// More fractional digits than one nanosecond resolves.
    #[error("finer than one nanosecond")]
    TooPrecise,
    #[error("out of range")]
    Overflow,
}

/// Parse an unsigned decimal literal (`12`, `0.5`, `2.5e-3`) scaled by `unit`
/// nanoseconds, exactly.
pub fn parse_decimal_nanos(text: &str, unit: u64) -> Result<Nanos, DecimalError> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = text[pos + 1..].parse().map_err(|_| DecimalError::Malformed)?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(DecimalError::Malformed);
    }
    // value = digits * 10^(exponent - frac_len) * unit
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    let mut value: u128 = 0;
    for b in digits.bytes() {
        value =
            value.checked_mul(10).and_then(|v| v.checked_add(u128::from(b - b'0'))).ok_or(DecimalError::Overflow)?;
    }
    value = value.checked_mul(u128::from(unit)).ok_or(DecimalError::Overflow)?;
    let scale = exponent - frac_part.len() as i32;
    if scale >= 0 {
        for _ in 0..scale {
            value = value.checked_mul(10).ok_or(DecimalError::Overflow)?;
            if value > u128::from(u64::MAX) {
                return Err(DecimalError::Overflow);
            }
        }
    } else {
        for _ in 0..(-scale) {
            if value == 0 {
                break;
            }
            if !value.is_multiple_of(10) {
                return Err(DecimalError::TooPrecise);
            }
            value /= 10;
        }
    }
    u64::try_from(value).map(Nanos).map_err(|_| DecimalError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal_nanos("12.5", NANOS_PER_MILLI), Ok(Nanos(12_500_000)));
        assert_eq!(parse_decimal_nanos("0.001", NANOS_PER_SEC), Ok(Nanos(1_000_000)));
        assert_eq!(parse_decimal_nanos("2.5e-3", NANOS_PER_SEC), Ok(Nanos(2_500_000)));
        assert_eq!(parse_decimal_nanos("1e2", NANOS_PER_MILLI), Ok(Nanos(100_000_000)));
        assert_eq!(parse_decimal_nanos("0", NANOS_PER_SEC), Ok(Nanos(0)));
        assert_eq!(parse_decimal_nanos("0.0000000001", NANOS_PER_SEC), Err(DecimalError::TooPrecise));
        assert_eq!(parse_decimal_nanos("1.", NANOS_PER_SEC), Ok(Nanos(NANOS_PER_SEC)));
        assert_eq!(parse_decimal_nanos("x", NANOS_PER_SEC), Err(DecimalError::Malformed));
        assert_eq!(parse_decimal_nanos("1e30", NANOS_PER_SEC), Err(DecimalError::Overflow));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Nanos(12_500_000).to_decimal(NANOS_PER_MILLI), "12.5");
        assert_eq!(Nanos(200_000_000).to_decimal(NANOS_PER_MILLI), "200");
        assert_eq!(Nanos(1).to_decimal(NANOS_PER_SEC), "0.000000001");
        assert_eq!(Nanos(0).to_decimal(NANOS_PER_SEC), "0");
    }

    #[test]
    fn render_then_parse_is_identity() {
        for v in [0u64, 1, 999, 1_000_000, 123_456_789, 98_765_432_101] {
            for unit in [NANOS_PER_SEC, NANOS_PER_MILLI] {
                let text = Nanos(v).to_decimal(unit);
                assert_eq!(parse_decimal_nanos(&text, unit), Ok(Nanos(v)), "{text}");
            }
        }
    }
}
