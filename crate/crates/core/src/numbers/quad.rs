//! Elements `a + b√D` of a real quadratic field.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{rsign, serde_rational, Enclosure, Rational, Sign};
use crate::error::Error;

/// Splits `n = s²·d` with `d` square-free. Returns `(s, d)`.
pub fn squarefree_part(n: u64) -> (u64, u64) {
    assert!(n > 0, "squarefree_part(0)");
    let mut s = 1u64;
    let mut d = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    d *= m;
    (s, d)
}

/// `a + b√D`. Canonical: `D` square-free, and `D = 1` exactly when `b = 0`.
///
/// Binary operations between two irrational values need the same `D`; mixing
/// fields panics (use [`super::TowerExt`] for that).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuadRepr", into = "QuadRepr")]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    d: u64,
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    #[serde(with = "serde_rational")]
    a: Rational,
    #[serde(with = "serde_rational")]
    b: Rational,
    #[serde(rename = "D")]
    d: u64,
}

impl TryFrom<QuadRepr> for QuadExt {
    type Error = String;
    fn try_from(r: QuadRepr) -> Result<Self, String> {
        if r.d == 0 {
            return Err("D must be positive".into());
        }
        Ok(QuadExt::new(r.a, r.b, r.d))
    }
}

impl From<QuadExt> for QuadRepr {
    fn from(q: QuadExt) -> Self {
        QuadRepr { a: q.a, b: q.b, d: q.d }
    }
}

impl QuadExt {
    /// `a + b√n` for any positive `n`; square factors of `n` are pulled into `b`.
    pub fn new(a: Rational, b: Rational, n: u64) -> Self {
        let (s, d) = squarefree_part(n);
        let b = b * Rational::from_integer(BigInt::from(s));
        if d == 1 {
            QuadExt { a: a + b, b: Rational::zero(), d: 1 }
        } else if b.is_zero() {
            QuadExt { a, b, d: 1 }
        } else {
            QuadExt { a, b, d }
        }
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadExt { a, b: Rational::zero(), d: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `√n`.
    pub fn sqrt(n: u64) -> Self {
        QuadExt::new(Rational::zero(), Rational::one(), n)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// The square-free radicand (1 for rational values).
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// `a² − b²D`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(BigInt::from(self.d))
    }

    pub fn sign(&self) -> Sign {
        qsign(self)
    }

    pub fn inv(&self) -> Result<Self, Error> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QuadExt { a: &self.a / &n, b: -(&self.b / &n), d: self.d })
    }

    pub fn abs(&self) -> Self {
        if self.sign().is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QuadExt::from_int(1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn enclose(&self, prec: u32) -> Enclosure {
        Enclosure::of_rational(&self.a, prec).add(&Enclosure::scaled_sqrt(&self.b, self.d, prec))
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(128).to_f64()
    }

    fn common_d(&self, o: &Self) -> u64 {
        match (self.d, o.d) {
            (1, d) | (d, 1) => d,
            (x, y) if x == y => x,
            (x, y) => panic!("QuadExt field mismatch: sqrt({x}) vs sqrt({y})"),
        }
    }

    fn canon(a: Rational, b: Rational, d: u64) -> Self {
        if b.is_zero() {
            QuadExt { a, b, d: 1 }
        } else {
            QuadExt { a, b, d }
        }
    }
}

/// Exact sign of `a + b√D`: compare `a²` with `b²D` when the signs of `a` and `b` disagree.
pub fn qsign(x: &QuadExt) -> Sign {
    let sa = rsign(&x.a);
    let sb = rsign(&x.b);
    if sb.is_zero() {
        return sa;
    }
    if sa.is_zero() || sa == sb {
        return sb;
    }
    let a2 = &x.a * &x.a;
    let b2d = &x.b * &x.b * Rational::from_integer(BigInt::from(x.d));
    match a2.cmp(&b2d) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => Sign::Zero,
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use super::format_rational as fr;
        if self.b.is_zero() {
            return write!(f, "{}", fr(&self.a));
        }
        let sgn = if self.b.is_negative() { "-" } else { "+" };
        write!(f, "{} {} {}*sqrt({})", fr(&self.a), sgn, fr(&self.b.abs()), self.d)
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::from_rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt::from_int(1)
    }
}

impl Add<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn add(self, o: &QuadExt) -> QuadExt {
        let d = self.common_d(o);
        QuadExt::canon(&self.a + &o.a, &self.b + &o.b, d)
    }
}

impl Sub<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn sub(self, o: &QuadExt) -> QuadExt {
        let d = self.common_d(o);
        QuadExt::canon(&self.a - &o.a, &self.b - &o.b, d)
    }
}

impl Mul<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn mul(self, o: &QuadExt) -> QuadExt {
        let d = self.common_d(o);
        let dd = Rational::from_integer(BigInt::from(d));
        QuadExt::canon(
            &self.a * &o.a + &self.b * &o.b * dd,
            &self.a * &o.b + &self.b * &o.a,
            d,
        )
    }
}

impl Div<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    /// Panics on division by zero; use [`QuadExt::inv`] for a checked version.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &QuadExt) -> QuadExt {
        self * &o.inv().expect("QuadExt division by zero")
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -self.a, b: -self.b, d: self.d }
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { (&self).$m(&o) }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t { (&self).$m(o) }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(QuadExt, Add add, Sub sub, Mul mul, Div div);
