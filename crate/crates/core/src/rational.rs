//! Text encoding of exact rationals.
//!
//! Accepted inputs: `"a/b"`, an integer `"a"`, or a decimal with at most
//! [`MAX_FRACTION_DIGITS`] fractional digits (converted exactly to `a/10^k`).
//! Output is always lowest-terms `"a/b"`, or `"a"` when the denominator is 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

pub const MAX_FRACTION_DIGITS: usize = 18;

/// Builds `numer/denom` from machine integers. Panics if `denom == 0`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `numer / 2^exp`.
pub fn dyadic(numer: u64, exp: u32) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::one() << exp)
}

/// `2^-exp`.
pub fn pow2_inv(exp: u32) -> Rational {
    dyadic(1, exp)
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num)?;
        let den = parse_int(den)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.len() > MAX_FRACTION_DIGITS {
            return Err(Error::Parse(format!("{s:?} has more than {MAX_FRACTION_DIGITS} fractional digits")));
        }
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("malformed decimal {s:?}")));
        }
        let negative = int_part.starts_with('-');
        let digits = int_part.trim_start_matches(['-', '+']);
        let whole = if digits.is_empty() { BigInt::zero() } else { parse_int(digits)? };
        let frac: BigInt = parse_int(frac_part)?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let magnitude = BigRational::new(whole * &scale + frac, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    Ok(BigRational::from_integer(parse_int(s)?))
}

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed integer {s:?}")));
    }
    t.parse::<BigInt>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Lowest-terms `"a/b"`, or `"a"` for integers.
pub fn format_rational(value: &Rational) -> String {
    // BigRational keeps itself reduced with a positive denominator.
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal rendering with `digits` places, rounded half away from zero.
pub fn format_decimal(value: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = value.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let int_part = &rounded / &scale;
    let frac_part = &rounded % &scale;
    let sign = if value.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}
