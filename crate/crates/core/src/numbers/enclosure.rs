//! Certified fixed-point enclosures: a real `x` is bracketed as `x·2^prec ∈ [lo, hi]`.
//!
//! All rounding is outward, so every bound derived from an enclosure is a true
//! bound. Used for sign refinement, exact floors and lattice-range pruning.

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Rational, Sign};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

static SQRT_CACHE: LazyLock<Mutex<HashMap<u64, (u32, BigInt)>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// `floor(sqrt(r) · 2^prec)`, memoised at the highest precision seen per radicand.
pub fn sqrt_floor_scaled(r: u64, prec: u32) -> BigInt {
    let mut cache = SQRT_CACHE.lock().expect("sqrt cache poisoned");
    if let Some((p, s)) = cache.get(&r) {
        if *p >= prec {
            return s >> (p - prec);
        }
    }
    let prev = cache.get(&r).map(|(p, _)| *p).unwrap_or(0);
    let target = prec.max(prev.saturating_mul(2)).div_ceil(64) * 64;
    let s = (BigInt::from(r) << (2 * target as usize)).sqrt();
    let out = &s >> (target - prec);
    cache.insert(r, (target, s));
    out
}

fn shift_floor(x: &BigInt, p: u32) -> BigInt {
    x.div_floor(&(BigInt::one() << p as usize))
}

fn shift_ceil(x: &BigInt, p: u32) -> BigInt {
    let d = BigInt::one() << p as usize;
    let (q, r) = x.div_mod_floor(&d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

impl Enclosure {
    pub fn point(v: BigInt, prec: u32) -> Self {
        Enclosure { lo: v.clone(), hi: v, prec }
    }

    pub fn of_integer(n: &BigInt, prec: u32) -> Self {
        Self::point(n << prec as usize, prec)
    }

    pub fn of_rational(q: &Rational, prec: u32) -> Self {
        let scaled = q.numer() << prec as usize;
        let (fl, rem) = scaled.div_mod_floor(q.denom());
        let hi = if rem.is_zero() { fl.clone() } else { &fl + 1 };
        Enclosure { lo: fl, hi, prec }
    }

    /// Enclosure of `sqrt(r)`.
    pub fn sqrt(r: u64, prec: u32) -> Self {
        let s = sqrt_floor_scaled(r, prec);
        let exact = {
            let rt = (r as f64).sqrt().round() as u64;
            rt * rt == r
        };
        let hi = if exact { s.clone() } else { &s + 1 };
        Enclosure { lo: s, hi, prec }
    }

    /// Enclosure of `q · sqrt(r)`.
    pub fn scaled_sqrt(q: &Rational, r: u64, prec: u32) -> Self {
        if r == 1 {
            return Self::of_rational(q, prec);
        }
        // extra bits keep the absolute error near 2^-prec for large |q|
        let extra = q.numer().bits() as u32;
        let s = Self::sqrt(r, prec + extra);
        let (a, b) = if q.is_negative() { (&s.hi, &s.lo) } else { (&s.lo, &s.hi) };
        let den = q.denom() << extra as usize;
        let lo = (q.numer() * a).div_floor(&den);
        let hi_num = q.numer() * b;
        let (hq, hr) = hi_num.div_mod_floor(&den);
        let hi = if hr.is_zero() { hq } else { hq + 1 };
        Enclosure { lo, hi, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(BigInt::zero(), prec)
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        debug_assert_eq!(self.prec, o.prec);
        Enclosure { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn scale_int(&self, k: &BigInt) -> Enclosure {
        if k.is_negative() {
            Enclosure { lo: &self.hi * k, hi: &self.lo * k, prec: self.prec }
        } else {
            Enclosure { lo: &self.lo * k, hi: &self.hi * k, prec: self.prec }
        }
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        debug_assert_eq!(self.prec, o.prec);
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mn = c.iter().min().unwrap();
        let mx = c.iter().max().unwrap();
        Enclosure { lo: shift_floor(mn, self.prec), hi: shift_ceil(mx, self.prec), prec: self.prec }
    }

    /// Enclosure of `1/x`, when zero is excluded.
    pub fn recip(&self) -> Option<Enclosure> {
        if !(self.lo.is_positive() || self.hi.is_negative()) {
            return None;
        }
        let one = BigInt::one() << (2 * self.prec as usize);
        let lo = one.div_floor(&self.hi);
        let (q, r) = one.div_mod_floor(&self.lo);
        let hi = if r.is_zero() { q } else { q + 1 };
        Some(Enclosure { lo, hi, prec: self.prec })
    }

    pub fn hull(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: (&self.lo).min(&o.lo).clone(),
            hi: (&self.hi).max(&o.hi).clone(),
            prec: self.prec,
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    /// `floor(x)` when the enclosure pins it down.
    pub fn floor(&self) -> Option<BigInt> {
        let a = shift_floor(&self.lo, self.prec);
        let b = shift_floor(&self.hi, self.prec);
        (a == b).then_some(a)
    }

    /// A lower bound for `ceil(x)`.
    pub fn ceil_lower(&self) -> BigInt {
        shift_ceil(&self.lo, self.prec)
    }

    /// An upper bound for `floor(x)`.
    pub fn floor_upper(&self) -> BigInt {
        shift_floor(&self.hi, self.prec)
    }

    pub fn lo_rational(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.prec as usize)
    }

    pub fn hi_rational(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.prec as usize)
    }

    pub fn width_bits(&self) -> u64 {
        (&self.hi - &self.lo).bits()
    }

    pub fn to_f64(&self) -> f64 {
        let mid: BigInt = (&self.lo + &self.hi) >> 1usize;
        let b = mid.bits() as i64;
        let (m, shift) = if b > 60 { (&mid >> (b - 60) as usize, b - 60) } else { (mid, 0) };
        let m = m.to_f64().unwrap_or(0.0);
        m * 2f64.powi((shift - self.prec as i64).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}
