//! Ordered-field abstraction used by the geometry layer.
//!
//! The exact types are the real implementations; `f64` is here so the same
//! geometry code can be run approximately for plotting and quick exploration.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Zero};

use super::{rsign, Enclosure, QuadExt, Rational, Sign, TowerExt};
use crate::error::Error;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn sign(&self) -> Sign;
    fn checked_recip(&self) -> Result<Self, Error>;
    fn from_rational(q: &Rational) -> Self;
    fn floor(&self) -> BigInt;
    fn to_f64(&self) -> f64;
    /// Outward-rounded enclosure at `prec` fractional bits.
    fn enclose(&self, prec: u32) -> Enclosure;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn from_bigint(n: &BigInt) -> Self {
        Self::from_rational(&Rational::from_integer(n.clone()))
    }

    fn cmp_to(&self, o: &Self) -> std::cmp::Ordering {
        (self.clone() - o.clone()).sign().as_ordering()
    }

    fn lt(&self, o: &Self) -> bool {
        self.cmp_to(o).is_lt()
    }

    fn le(&self, o: &Self) -> bool {
        self.cmp_to(o).is_le()
    }

    fn is_pos(&self) -> bool {
        self.sign().is_positive()
    }

    fn is_neg(&self) -> bool {
        self.sign().is_negative()
    }

    fn abs_val(&self) -> Self {
        if self.is_neg() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b.lt(&a) {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a.lt(&b) {
            b
        } else {
            a
        }
    }

    fn half(&self) -> Self {
        self.clone() * Self::from_rational(&Rational::new(BigInt::one(), BigInt::from(2)))
    }
}

/// Scalars that can hold eigen-data of an integer 2×2 matrix.
pub trait EigenScalar: Scalar {
    fn from_quad(q: &QuadExt) -> Self;
}

impl Scalar for Rational {
    fn sign(&self) -> Sign {
        rsign(self)
    }
    fn checked_recip(&self) -> Result<Self, Error> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }
    fn to_f64(&self) -> f64 {
        Enclosure::of_rational(self, 128).to_f64()
    }
    fn enclose(&self, prec: u32) -> Enclosure {
        Enclosure::of_rational(self, prec)
    }
}

impl Scalar for QuadExt {
    fn sign(&self) -> Sign {
        super::qsign(self)
    }
    fn checked_recip(&self) -> Result<Self, Error> {
        self.inv()
    }
    fn from_rational(q: &Rational) -> Self {
        QuadExt::from_rational(q.clone())
    }
    fn floor(&self) -> BigInt {
        TowerExt::from_quad(self).floor()
    }
    fn to_f64(&self) -> f64 {
        QuadExt::to_f64(self)
    }
    fn enclose(&self, prec: u32) -> Enclosure {
        QuadExt::enclose(self, prec)
    }
}

impl EigenScalar for QuadExt {
    fn from_quad(q: &QuadExt) -> Self {
        q.clone()
    }
}

impl Scalar for TowerExt {
    fn sign(&self) -> Sign {
        super::tsign(self)
    }
    fn checked_recip(&self) -> Result<Self, Error> {
        self.inv()
    }
    fn from_rational(q: &Rational) -> Self {
        TowerExt::from_rational(q.clone())
    }
    fn floor(&self) -> BigInt {
        TowerExt::floor(self)
    }
    fn to_f64(&self) -> f64 {
        TowerExt::to_f64(self)
    }
    fn enclose(&self, prec: u32) -> Enclosure {
        TowerExt::enclose(self, prec)
    }
    fn cmp_to(&self, o: &Self) -> std::cmp::Ordering {
        (self - o).sign().as_ordering()
    }
}

impl EigenScalar for TowerExt {
    fn from_quad(q: &QuadExt) -> Self {
        TowerExt::from_quad(q)
    }
}

impl Scalar for f64 {
    fn sign(&self) -> Sign {
        if *self > 0.0 {
            Sign::Positive
        } else if *self < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
    fn checked_recip(&self) -> Result<Self, Error> {
        if *self == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }
    fn from_rational(q: &Rational) -> Self {
        Scalar::to_f64(q)
    }
    fn floor(&self) -> BigInt {
        BigInt::from_f64(f64::floor(*self)).unwrap_or_default()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn enclose(&self, prec: u32) -> Enclosure {
        let q = Rational::from_float(*self).unwrap_or_default();
        Enclosure::of_rational(&q, prec)
    }
}

impl EigenScalar for f64 {
    fn from_quad(q: &QuadExt) -> Self {
        q.to_f64()
    }
}
