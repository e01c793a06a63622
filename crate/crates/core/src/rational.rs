//! Exact rational arithmetic helpers.
//!
//! Probabilities and treatment-effect estimates are carried as
//! [`BigRational`] values, which are always stored in lowest terms.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use num_rational::BigRational as Rational;

/// Builds `num / den` from machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_counts(num: u128, den: u128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `"p/q"`; integers keep an explicit `/1`.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if d != 0.0 && n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large operands: scale down through the integer part.
            let int = r.to_integer();
            int.to_f64().unwrap_or(f64::NAN)
        }
    }
}

/// Parses a decimal literal such as `3.25`, `-7`, `1e3` or `2.5E-1` into an
/// exact rational. Fractions written as `p/q` are accepted too.
pub fn parse_decimal(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not a finite decimal number"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Serializes a rational as its `"p/q"` string form.
pub fn serialize_fraction<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    to_fraction_string(r).serialize(s)
}

pub fn is_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("3.25").unwrap(), ratio(13, 4));
        assert_eq!(parse_decimal("-7").unwrap(), ratio(-7, 1));
        assert_eq!(parse_decimal("1e3").unwrap(), ratio(1000, 1));
        assert_eq!(parse_decimal("2.5E-1").unwrap(), ratio(1, 4));
        assert_eq!(parse_decimal(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_decimal("6/4").unwrap(), ratio(3, 2));
    }

    #[test]
    fn rejects_non_numbers() {
        for s in ["", "abc", "1.2.3", "NaN", "inf", "1/0", "-", "."] {
            assert!(parse_decimal(s).is_err(), "{s}");
        }
    }

    #[test]
    fn fraction_string_keeps_denominator() {
        assert_eq!(to_fraction_string(&ratio(0, 5)), "0/1");
        assert_eq!(to_fraction_string(&ratio(4, 14)), "2/7");
    }
}
