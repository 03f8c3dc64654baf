//! Exact rational arithmetic helpers.
//!
//! All metric-space computations in this crate use arbitrary-precision
//! rationals so that identities and inequalities can be asserted with zero
//! tolerance. Rationals serialize as `"p/q"` strings (or `"p"` for integers).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Build `p/q` from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Build the integer rational `p`.
pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// 2^-k as an exact rational.
pub fn pow2_neg(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(2u8).pow(k))
}

/// Parse `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let bad = || RatParseError::Invalid(s.to_owned());
    match s.split_once('/') {
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(p))
        }
        Some((num, den)) => {
            let p: BigInt = num.trim().parse().map_err(|_| bad())?;
            let q: BigInt = den.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(RatParseError::ZeroDenominator(s.to_owned()));
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Canonical `"p/q"` rendering, `"p"` when the denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact absolute value.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

/// Approximate conversion for report output only; never used in decisions.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Good enough for report columns; exact values are carried alongside.
    let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    nf / df
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "1", "-3", "1/2", "-7/4", "10/15"] {
            let r = parse_rat(s).unwrap();
            let t = parse_rat(&fmt_rat(&r)).unwrap();
            assert_eq!(r, t);
        }
        assert_eq!(parse_rat("10/15").unwrap(), rat(2, 3));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rat("").is_err());
        assert!(parse_rat("a/b").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("1.5").is_err());
    }

    #[test]
    fn dyadic_powers() {
        assert_eq!(pow2_neg(0), rat_one());
        assert_eq!(pow2_neg(3), rat(1, 8));
    }
}
