//! Exact rational window arithmetic shared by the layered-graph machinery.
//!
//! All weight-class boundaries have the form τ·W with τ a multiple of the
//! granularity g and W = (1+ε⁴)^i, so membership tests reduce to computing
//! floor(w / (g·W)) or ceil(w / (g·W)) exactly. Floating point is never used
//! for these comparisons; ties like "gain exactly 2W" must resolve exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

pub(crate) fn rat_int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub(crate) fn ratio(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// base^exp by repeated squaring; exponents here stay in the hundreds.
pub(crate) fn rat_pow(base: &BigRational, mut exp: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// floor(w / q) as an exact integer.
pub(crate) fn floor_units(w: i64, q: &BigRational) -> BigInt {
    assert!(q.is_positive(), "unit must be positive");
    (rat_int(w) / q).floor().to_integer()
}

/// ceil(w / q) as an exact integer.
pub(crate) fn ceil_units(w: i64, q: &BigRational) -> BigInt {
    assert!(q.is_positive(), "unit must be positive");
    (rat_int(w) / q).ceil().to_integer()
}

/// Parse an exact non-negative rational from "a/b", a decimal like "0.4", or
/// a plain integer. Decimal inputs are taken at face value (0.4 = 2/5), not
/// as the nearest float.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = |msg: &str| Error::Param(format!("invalid ratio {s:?}: {msg}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| bad("numerator"))?;
        let den: BigInt = b.trim().parse().map_err(|_| bad("denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        let r = BigRational::new(num, den);
        if r.is_negative() {
            return Err(bad("must be non-negative"));
        }
        return Ok(r);
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let digits = format!("{int}{frac}");
        let num: BigInt = digits.parse().map_err(|_| bad("decimal digits"))?;
        if num.is_negative() {
            return Err(bad("must be non-negative"));
        }
        let den = rat_pow(&rat_int(10), frac.len() as u32);
        return Ok(BigRational::from_integer(num) / den);
    }
    let num: BigInt = s.parse().map_err(|_| bad("integer"))?;
    if num.is_negative() {
        return Err(bad("must be non-negative"));
    }
    Ok(BigRational::from_integer(num))
}

/// Render a rational compactly for reports: integer if exact, else "a/b".
pub fn format_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_ceil_exact_on_boundaries() {
        let q = ratio(1, 4); // 0.25
        assert_eq!(floor_units(2, &q), BigInt::from(8));
        assert_eq!(ceil_units(2, &q), BigInt::from(8));
        let q = ratio(3, 7);
        assert_eq!(floor_units(2, &q), BigInt::from(4)); // 14/3 = 4.66
        assert_eq!(ceil_units(2, &q), BigInt::from(5));
    }

    #[test]
    fn pow_matches_naive() {
        let b = ratio(641, 625); // 1 + 0.4^4
        let mut naive = BigRational::one();
        for _ in 0..13 {
            naive *= &b;
        }
        assert_eq!(rat_pow(&b, 13), naive);
        assert_eq!(rat_pow(&b, 0), BigRational::one());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_ratio("2/5").unwrap(), ratio(2, 5));
        assert_eq!(parse_ratio("0.4").unwrap(), ratio(2, 5));
        assert_eq!(parse_ratio(".125").unwrap(), ratio(1, 8));
        assert_eq!(parse_ratio("3").unwrap(), rat_int(3));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1/2").is_err());
        assert!(parse_ratio("x").is_err());
    }
}
