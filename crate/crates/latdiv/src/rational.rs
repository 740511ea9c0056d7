//! Exact rational literals.
//!
//! All numeric values in file formats are strings: decimal integers or
//! `p/q` with `q > 0`. Output is always in lowest terms.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("negative value `{0}` not allowed here")]
    Negative(String),
}

fn parse_int(text: &str, whole: &str) -> Result<BigInt, RationalParseError> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RationalParseError::Malformed(whole.to_string()));
    }
    text.parse()
        .map_err(|_| RationalParseError::Malformed(whole.to_string()))
}

/// Parses a nonnegative rational literal: `p` or `p/q` in base 10.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(RationalParseError::Empty);
    }
    if trimmed.starts_with('-') {
        return Err(RationalParseError::Negative(trimmed.to_string()));
    }
    match trimmed.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(trimmed, trimmed)?)),
        Some((p, q)) => {
            let numer = parse_int(p, trimmed)?;
            let denom = parse_int(q, trimmed)?;
            if denom.is_zero() {
                return Err(RationalParseError::ZeroDenominator(trimmed.to_string()));
            }
            Ok(BigRational::new(numer, denom))
        }
    }
}

/// Formats a rational in lowest terms, as `p` when integral and `p/q` otherwise.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// `n` as an exact rational. Convenience for literals in code and tests.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n/d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sum of a sequence of rationals.
pub fn sum<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
    values
        .into_iter()
        .fold(BigRational::zero(), |acc, v| acc + v)
}

/// True if the value is negative; used to police file inputs.
pub fn is_negative(value: &BigRational) -> bool {
    value.is_negative()
}
