//! Exact rational helpers and the `{"num": p, "den": q}` JSON convention.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Builds a rational from machine integers.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact power of two, `2^e`, for any integer exponent.
pub fn pow2(e: i64) -> BigRational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// Exact value of a finite float. Every finite f64 is a dyadic rational, so
/// this conversion is lossless.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `r^k` for integer k ≥ 0.
pub fn pow_u(r: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

/// Serde adaptor: rationals as `{"num": p, "den": q}` with reduced terms.
#[derive(Serialize, Deserialize)]
struct NumDen {
    num: i64,
    den: i64,
}

pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    let num = r.numer().to_i64().ok_or_else(|| {
        serde::ser::Error::custom(format!("rational numerator {} exceeds i64", r.numer()))
    })?;
    let den = r.denom().to_i64().ok_or_else(|| {
        serde::ser::Error::custom(format!("rational denominator {} exceeds i64", r.denom()))
    })?;
    NumDen { num, den }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    let nd = NumDen::deserialize(d)?;
    if nd.den == 0 {
        return Err(D::Error::custom("rational with zero denominator"));
    }
    Ok(ratio(nd.num, nd.den))
}

/// Same convention for `Vec<BigRational>` fields.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &[BigRational],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct W<'a>(#[serde(with = "super")] &'a BigRational);
        s.collect_seq(v.iter().map(W))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigRational>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "super")] BigRational);
        let v = Vec::<W>::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

/// Decimal rendering with a fixed number of significant digits, used by the
/// CSV output (which also carries the exact num/den columns alongside).
pub fn to_decimal_string(r: &BigRational, sig_digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let x = to_f64(r);
    format!("{:.*e}", sig_digits.saturating_sub(1), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_matches_float() {
        assert_eq!(to_f64(&pow2(3)), 8.0);
        assert_eq!(to_f64(&pow2(-4)), 0.0625);
        assert_eq!(pow2(0), BigRational::one());
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        let r = from_f64(0.1).unwrap();
        assert_eq!(to_f64(&r), 0.1);
        assert!(from_f64(f64::INFINITY).is_none());
    }

    #[test]
    fn json_num_den() {
        #[derive(Serialize, Deserialize)]
        struct T(#[serde(with = "super")] BigRational);
        let t = T(ratio(3, 7));
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"num":3,"den":7}"#);
        let back: T = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, ratio(3, 7));
    }
}
