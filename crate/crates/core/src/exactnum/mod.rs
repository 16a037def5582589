//! Arbitrary-precision rationals and interval reals with certified series
//! truncation. This is the numeric substrate for every other module.

mod interval;
mod real;

pub use interval::{CmpCertified, IntervalReal};
pub use real::{ExactReal, SeriesKind};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number. Normalization (positive denominator, reduced
/// fraction) is maintained by `num_rational` on construction.
pub type Rational = BigRational;

pub fn rat_i64(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rational {
    BigRational::from_integer(BigInt::from(p))
}

pub fn rat_big(p: BigInt) -> Rational {
    BigRational::from_integer(p)
}

/// Parse "p/q" or "p". Used for all JSON and CLI rational input.
pub fn rat_parse(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> crate::Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| crate::Error::InvalidParameter(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(crate::Error::InvalidParameter(format!(
                    "zero denominator in {s:?}"
                )));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
    }
}

/// Render as "p/q", or just "p" for integers. Inverse of `rat_parse`.
pub fn rat_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Deterministic decimal rendering with `digits` places, truncated toward
/// zero, for report files. Never goes through floating point.
pub fn decimal_string(r: &Rational, digits: u32) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (a * BigRational::from_integer(scale.clone())).trunc();
    let scaled = scaled.to_integer();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let frac_str = format!("{:0>width$}", frac_part.to_string(), width = digits as usize);
    format!("{sign}{int_part}.{frac_str}")
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Nearest integer, rounding half toward negative infinity (so the chosen
/// residual is the lexicographically smaller one on exact ties).
pub fn round_half_down(r: &Rational) -> BigInt {
    ceil_int(&(r - rat_i64(1, 2)))
}

/// Serde adapter: a `Rational` field as a "p/q" string.
pub mod rational_serde {
    use super::{rat_parse, rat_string, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rat_parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec_serde {
    use super::{rat_parse, rat_string, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| rat_string(r)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| rat_parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Vec<BigInt>` as decimal strings.
pub mod bigint_vec_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|_| serde::de::Error::custom(format!("bad integer {s:?}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_roundtrip() {
        for s in ["3/7", "-3/7", "5", "0", "-12"] {
            let r = rat_parse(s).unwrap();
            assert_eq!(rat_string(&r), s);
        }
        // non-canonical input normalizes
        assert_eq!(rat_string(&rat_parse("4/6").unwrap()), "2/3");
        assert_eq!(rat_string(&rat_parse("3/-6").unwrap()), "-1/2");
        assert!(rat_parse("1/0").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&rat_i64(1, 3), 6), "0.333333");
        assert_eq!(decimal_string(&rat_i64(-22, 7), 4), "-3.1428");
        assert_eq!(decimal_string(&rat_int(5), 2), "5.00");
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(round_half_down(&rat_i64(5, 2)), BigInt::from(2));
        assert_eq!(round_half_down(&rat_i64(-5, 2)), BigInt::from(-3));
        assert_eq!(round_half_down(&rat_i64(7, 3)), BigInt::from(2));
    }
}
