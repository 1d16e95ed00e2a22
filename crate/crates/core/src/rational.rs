//! Exact rational helpers.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational in canonical reduced form.
pub type Rational = num_rational::BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("expected \"numerator/denominator\", got {0:?}")]
    Syntax(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("{0:?} is not in lowest terms")]
    NotReduced(String),
}

/// Parses `"p/q"` (or a bare integer). When `require_reduced` is set the
/// fraction must already be in lowest terms with a positive denominator.
pub fn parse(text: &str, require_reduced: bool) -> Result<Rational, ParseRationalError> {
    let syntax = || ParseRationalError::Syntax(text.to_string());
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let numer: BigInt = num.parse().map_err(|_| syntax())?;
    let denom: BigInt = den.parse().map_err(|_| syntax())?;
    if denom.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    if require_reduced && (denom.is_negative() || !numer.gcd(&denom).is_one()) {
        return Err(ParseRationalError::NotReduced(text.to_string()));
    }
    Ok(Rational::new(numer, denom))
}

/// Renders as `"p/q"`, always with an explicit denominator.
pub fn format(value: &Rational) -> String {
    alloc::format!("{}/{}", value.numer(), value.denom())
}

/// Display adapter that prints integers without a denominator.
pub struct Compact<'a>(pub &'a Rational);

impl fmt::Display for Compact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Least common multiple of the denominators, 1 for an empty input.
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse("2/3", true).unwrap(), ratio(2, 3));
        assert_eq!(parse("1", true).unwrap(), one());
        assert_eq!(format(&ratio(4, 6)), "2/3");
        assert_eq!(format(&one()), "1/1");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse("1/0", true), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!(parse("2/4", true), Err(ParseRationalError::NotReduced(_))));
        assert_eq!(parse("2/4", false).unwrap(), ratio(1, 2));
        assert!(matches!(parse("a/b", false), Err(ParseRationalError::Syntax(_))));
    }

    #[test]
    fn lcd() {
        let vals = [ratio(1, 3), ratio(2, 3), ratio(1, 2)];
        assert_eq!(lcm_of_denominators(vals.iter()), BigInt::from(6));
    }
}
