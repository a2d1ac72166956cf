//! Rational helpers and the `{"num": "...", "den": "..."}` wire format.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use std::fmt;

use super::Sign;
use crate::error::Error;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rsign(q: &Rational) -> Sign {
    if q.is_zero() {
        Sign::Zero
    } else if q.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Parses `p/q`, `p`, or a finite decimal such as `0.125`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn bits(q: &Rational) -> u64 {
    q.numer().bits().max(q.denom().bits())
}

/// Serde adapter for [`Rational`]. Accepts the object form or a `"p/q"` string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &q.numer().to_string())?;
        st.serialize_field("den", &q.denom().to_string())?;
        st.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }

    struct RationalVisitor;

    impl<'de> Visitor<'de> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a rational as {\"num\",\"den\"} or \"p/q\"")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
            parse_rational(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
            Ok(Rational::from_integer(BigInt::from(v)))
        }

        fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Rational, A::Error> {
            let mut num: Option<BigInt> = None;
            let mut den: Option<BigInt> = None;
            while let Some(key) = map.next_key::<String>()? {
                let v: String = map.next_value()?;
                let parsed: BigInt = v
                    .parse()
                    .map_err(|_| de::Error::custom(format!("bad integer {v:?}")))?;
                match key.as_str() {
                    "num" => num = Some(parsed),
                    "den" => den = Some(parsed),
                    other => return Err(de::Error::unknown_field(other, &["num", "den"])),
                }
            }
            let num = num.ok_or_else(|| de::Error::missing_field("num"))?;
            let den = den.ok_or_else(|| de::Error::missing_field("den"))?;
            if den.is_zero() {
                return Err(de::Error::custom("zero denominator"));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Wrapper so rationals can sit inside `Vec`s and tuples with the same wire format.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RationalRepr(#[serde(with = "serde_rational")] pub Rational);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("1/5").unwrap(), rat(1, 5));
        assert_eq!(parse_rational(" -3 ").unwrap(), int(-3));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(matches!(parse_rational("1/0"), Err(Error::DivisionByZero)));
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn json_shape() {
        let r = RationalRepr(rat(-2, 6));
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":"-1","den":"3"}"#);
        let back: RationalRepr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let from_str: RationalRepr = serde_json::from_str(r#""4/8""#).unwrap();
        assert_eq!(from_str.0, rat(1, 2));
    }
}
