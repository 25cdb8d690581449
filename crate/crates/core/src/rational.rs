//! Exact rational scalars and the small helpers built around them.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision reduced fraction with positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(k: u64) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    Rational::from_integer(acc)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with `bits` significant binary digits (round half away from zero).
///
/// This is the rounding step of a software float with a `bits`-bit mantissa.
pub fn round_to_bits(r: &Rational, bits: u32) -> Rational {
    if r.is_zero() {
        return Rational::zero();
    }
    let num = r.numer().abs();
    let den = r.denom().clone();
    // exponent e with 2^e <= |r| < 2^(e+1), approximately from bit lengths
    let e = num.bits() as i64 - den.bits() as i64;
    let shift = bits as i64 - 1 - e;
    let two = BigInt::from(2);
    let scaled = if shift >= 0 {
        Rational::new(num << (shift as usize), den)
    } else {
        Rational::new(num, den * two.pow((-shift) as u32))
    };
    let rounded = (scaled + rat(1, 2)).floor().to_integer();
    let mag = if shift >= 0 {
        Rational::new(rounded, BigInt::one() << (shift as usize))
    } else {
        Rational::from_integer(rounded << ((-shift) as usize))
    };
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Decimal expansion truncated toward zero to `digits` fractional digits.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom();
    let (whole, mut rem) = num.div_rem(den);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            let (d, r2) = rem.div_rem(den);
            out.push_str(&d.to_string());
            rem = r2;
        }
    }
    out
}

/// Parses `a`, `a/b`, or a finite decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((w, f)) = s.split_once('.') {
        let neg = w.starts_with('-');
        let digits = format!("{}{}", w.trim_start_matches('-'), f);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = BigInt::from(10).pow(f.len() as u32);
        let v = Rational::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Serde adapter storing a rational as the string `"p/q"` (or `"p"`).
pub mod serde_str {
    use super::{parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of strings.
pub mod serde_vec {
    use super::{parse_rational, Rational};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}
