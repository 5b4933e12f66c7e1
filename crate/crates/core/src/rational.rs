//! Exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serializer;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `"p/q"`, or just `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for (p, q) in [(3, 4), (-5, 6), (8, 2), (0, 7)] {
            let r = ratio(p, q);
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert_eq!(format_rational(&ratio(6, 8)), "3/4");
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
