//! Exact rational arithmetic helpers.
//!
//! Every probability, payoff and game value in this crate is a
//! [`Rational`]; nothing is ever rounded. The helpers here parse the
//! `"num/den"` string form used by the JSON instance format and render
//! decimal approximations for reports. Decimal input is rejected so that
//! no precision is lost silently.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always stored in lowest terms
/// with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rational constants: `rat(3, 4)` is `3/4`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("decimal literals are rejected ({0:?}); write an exact fraction such as \"1/2\"")]
    DecimalRejected(String),
    #[error("malformed rational literal {0:?}; expected \"num\" or \"num/den\"")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parse `"num"` or `"num/den"` into a [`Rational`]. The numerator may be
/// negative; the denominator must be a positive integer. Anything that
/// looks like a decimal or scientific literal is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(ParseRationalError::DecimalRejected(s.to_string()));
    }
    let parse_int = |part: &str, allow_sign: bool| -> Option<BigInt> {
        let (negative, digits) = match part.strip_prefix('-') {
            Some(rest) if allow_sign => (true, rest),
            Some(_) => return None,
            None => (false, part),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let value = digits.parse::<BigInt>().ok()?;
        Some(if negative { -value } else { value })
    };
    let (numer, denom) = match s.split_once('/') {
        None => (
            parse_int(s, true).ok_or_else(|| ParseRationalError::Malformed(s.to_string()))?,
            BigInt::from(1),
        ),
        Some((n, d)) => (
            parse_int(n, true).ok_or_else(|| ParseRationalError::Malformed(s.to_string()))?,
            parse_int(d, false).ok_or_else(|| ParseRationalError::Malformed(s.to_string()))?,
        ),
    };
    if denom.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(numer, denom))
}

/// Decimal approximation of `r` with `sig` significant digits, computed by
/// exact integer arithmetic (round half away from zero). Only for display;
/// the rational itself stays authoritative.
pub fn decimal_approx(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let n = r.numer().abs();
    let d = r.denom().clone();
    let ten = BigInt::from(10);

    // e = floor(log10(n/d)): largest e with 10^e <= n/d.
    let pow10 = |k: i64| -> BigInt { ten.pow(k.unsigned_abs() as u32) };
    let le = |e: i64| -> bool {
        // 10^e <= n/d  <=>  d * 10^max(e,0) <= n * 10^max(-e,0)
        d.clone() * pow10(e.max(0)) <= n.clone() * pow10((-e).max(0))
    };
    let mut e = n.to_string().len() as i64 - d.to_string().len() as i64;
    while !le(e) {
        e -= 1;
    }
    while le(e + 1) {
        e += 1;
    }

    // Round n/d * 10^(sig-1-e) to the nearest integer.
    let scale = sig as i64 - 1 - e;
    let (num, den) = (n * pow10(scale.max(0)), d * pow10((-scale).max(0)));
    let mut q = (BigInt::from(2) * num + &den) / (BigInt::from(2) * den);
    let mut digits = q.to_string();
    if digits.len() > sig {
        // Rounding carried into an extra digit (e.g. 999.6 -> 1000).
        e += 1;
        q /= &ten;
        digits = q.to_string();
    }
    debug_assert_eq!(digits.len(), sig);

    if e >= sig as i64 || e < -5 {
        let (head, tail) = digits.split_at(1);
        format!("{sign}{head}.{tail}e{e}")
    } else if e >= 0 {
        let point = (e + 1) as usize;
        if point == digits.len() {
            format!("{sign}{digits}")
        } else {
            format!("{sign}{}.{}", &digits[..point], &digits[point..])
        }
    } else {
        let zeros = "0".repeat((-e - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

/// `to_f64` with a safe fallback for display contexts.
pub fn to_f64_lossy(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
