//! Multi-quadratic numbers `Σ c_r √r` over distinct square-free radicands `r`.
//!
//! Square roots of distinct square-free integers are linearly independent over
//! Q, so the sparse coefficient list is a canonical form: equality and the zero
//! test are structural. `Q(√D1, √D2)` is the case `r ∈ {1, D1, D2, core(D1·D2)}`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::quad::{forward_owned, squarefree_part};
use super::{bits, serde_rational, Enclosure, QuadExt, Rational, Sign};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "TowerRepr", into = "TowerRepr")]
pub struct TowerExt {
    /// Sorted by radicand, no zero coefficients.
    terms: Vec<(u64, Rational)>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(rename = "D")]
    d: u64,
    #[serde(with = "serde_rational")]
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct TowerRepr {
    terms: Vec<TermRepr>,
}

impl TryFrom<TowerRepr> for TowerExt {
    type Error = String;
    fn try_from(r: TowerRepr) -> Result<Self, String> {
        let mut acc = TowerExt::zero();
        for t in r.terms {
            if t.d == 0 {
                return Err("radicand must be positive".into());
            }
            acc = &acc + &TowerExt::scaled_sqrt(t.c, t.d);
        }
        Ok(acc)
    }
}

impl From<TowerExt> for TowerRepr {
    fn from(t: TowerExt) -> Self {
        TowerRepr { terms: t.terms.into_iter().map(|(d, c)| TermRepr { d, c }).collect() }
    }
}

fn primes_of(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl TowerExt {
    pub fn from_rational(q: Rational) -> Self {
        Self::scaled_sqrt(q, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `c·√n` for any positive `n`.
    pub fn scaled_sqrt(c: Rational, n: u64) -> Self {
        let (s, d) = squarefree_part(n);
        let c = c * Rational::from_integer(BigInt::from(s));
        if c.is_zero() {
            TowerExt::zero()
        } else {
            TowerExt { terms: vec![(d, c)] }
        }
    }

    pub fn sqrt(n: u64) -> Self {
        Self::scaled_sqrt(Rational::one(), n)
    }

    pub fn from_quad(q: &QuadExt) -> Self {
        &Self::from_rational(q.a().clone()) + &Self::scaled_sqrt(q.b().clone(), q.radicand())
    }

    /// `c00 + c01√D1 + c10√D2 + c11√(D1·D2)`.
    pub fn from_coeffs(d1: u64, d2: u64, c: [Rational; 4]) -> Self {
        let [c00, c01, c10, c11] = c;
        let parts = [
            Self::from_rational(c00),
            Self::scaled_sqrt(c01, d1),
            Self::scaled_sqrt(c10, d2),
            Self::scaled_sqrt(c11, d1 * d2),
        ];
        parts.iter().fold(Self::zero(), |a, b| &a + b)
    }

    /// Coefficients over the basis `1, √D1, √D2, √(D1·D2)` (square-free
    /// `D1 ≠ D2`), or `None` if the value does not live in that field.
    pub fn coeffs(&self, d1: u64, d2: u64) -> Option<[Rational; 4]> {
        let d12 = squarefree_part(d1 * d2);
        let mut out: [Rational; 4] = Default::default();
        for (r, c) in &self.terms {
            if *r == 1 {
                out[0] = c.clone();
            } else if *r == d1 {
                out[1] = c.clone();
            } else if *r == d2 {
                out[2] = c.clone();
            } else if *r == d12.1 {
                out[3] = c / Rational::from_integer(BigInt::from(d12.0));
            } else {
                return None;
            }
        }
        Some(out)
    }

    pub fn terms(&self) -> &[(u64, Rational)] {
        &self.terms
    }

    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|(r, _)| *r)
    }

    pub fn rational_part(&self) -> Rational {
        match self.terms.first() {
            Some((1, c)) => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(r, _)| *r == 1)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rational_part())
    }

    /// Narrows to a single quadratic field when possible.
    pub fn as_quad(&self) -> Option<QuadExt> {
        let irr: Vec<_> = self.terms.iter().filter(|(r, _)| *r != 1).collect();
        match irr.as_slice() {
            [] => Some(QuadExt::from_rational(self.rational_part())),
            [(d, c)] => Some(QuadExt::new(self.rational_part(), c.clone(), *d)),
            _ => None,
        }
    }

    fn from_terms(mut v: Vec<(u64, Rational)>) -> Self {
        v.sort_by_key(|(r, _)| *r);
        let mut out: Vec<(u64, Rational)> = Vec::with_capacity(v.len());
        for (r, c) in v {
            match out.last_mut() {
                Some((lr, lc)) if *lr == r => *lc += c,
                _ => out.push((r, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        TowerExt { terms: out }
    }

    /// Galois automorphism negating `√p` for the prime `p`.
    fn sigma(&self, p: u64) -> Self {
        TowerExt {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| if r % p == 0 { (*r, -c.clone()) } else { (*r, c.clone()) })
                .collect(),
        }
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut primes: Vec<u64> = self.radicands().flat_map(primes_of).collect();
        primes.sort_unstable();
        primes.dedup();
        let mut y = self.clone();
        let mut num = TowerExt::one();
        for p in primes {
            let c = y.sigma(p);
            num = &num * &c;
            y = &y * &c;
        }
        let r = y.as_rational().expect("norm lies in Q");
        let r_inv = TowerExt::from_rational(r.recip());
        Ok(&num * &r_inv)
    }

    fn max_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| bits(c)).max().unwrap_or(0)
    }

    pub fn enclose(&self, prec: u32) -> Enclosure {
        self.terms
            .iter()
            .fold(Enclosure::zero(prec), |acc, (r, c)| acc.add(&Enclosure::scaled_sqrt(c, *r, prec)))
    }

    fn start_prec(&self) -> u32 {
        (64 + 2 * self.max_bits()).min(1 << 20) as u32
    }

    pub fn sign(&self) -> Sign {
        tsign(self)
    }

    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.numer().div_floor(q.denom());
        }
        // Irrational: never an integer, so refinement separates it from both neighbours.
        let mut prec = self.start_prec();
        loop {
            if let Some(f) = self.enclose(prec).floor() {
                return f;
            }
            prec = prec.checked_mul(2).expect("floor refinement diverged");
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign().is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TowerExt::one();
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

    pub fn mul_rational(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return TowerExt::zero();
        }
        TowerExt { terms: self.terms.iter().map(|(r, c)| (*r, c * q)).collect() }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(128).to_f64()
    }
}

/// Exact sign. Zero is detected structurally; otherwise the enclosure is
/// refined (doubling precision) until it excludes 0, which terminates because
/// a nonzero canonical form is a nonzero real.
pub fn tsign(x: &TowerExt) -> Sign {
    if x.terms.is_empty() {
        return Sign::Zero;
    }
    if let [(1, c)] = x.terms.as_slice() {
        return super::rsign(c);
    }
    let mut prec = x.start_prec();
    loop {
        if let Some(s) = x.enclose(prec).sign() {
            return s;
        }
        prec = prec.checked_mul(2).expect("sign refinement diverged");
    }
}

impl fmt::Display for TowerExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use super::format_rational as fr;
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            let body = if *r == 1 { fr(&c.abs()) } else { format!("{}*sqrt({r})", fr(&c.abs())) };
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl Zero for TowerExt {
    fn zero() -> Self {
        TowerExt { terms: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for TowerExt {
    fn one() -> Self {
        TowerExt::from_int(1)
    }
}

impl Add<&TowerExt> for &TowerExt {
    type Output = TowerExt;
    fn add(self, o: &TowerExt) -> TowerExt {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            match (self.terms.get(i), o.terms.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    let c = &a.1 + &b.1;
                    if !c.is_zero() {
                        out.push((a.0, c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        TowerExt { terms: out }
    }
}

impl Neg for &TowerExt {
    type Output = TowerExt;
    fn neg(self) -> TowerExt {
        TowerExt { terms: self.terms.iter().map(|(r, c)| (*r, -c.clone())).collect() }
    }
}

impl Neg for TowerExt {
    type Output = TowerExt;
    fn neg(self) -> TowerExt {
        TowerExt { terms: self.terms.into_iter().map(|(r, c)| (r, -c)).collect() }
    }
}

impl Sub<&TowerExt> for &TowerExt {
    type Output = TowerExt;
    fn sub(self, o: &TowerExt) -> TowerExt {
        self + &(-o)
    }
}

impl Mul<&TowerExt> for &TowerExt {
    type Output = TowerExt;
    fn mul(self, o: &TowerExt) -> TowerExt {
        if self.terms.len() == 1 && self.terms[0].0 == 1 {
            return o.mul_rational(&self.terms[0].1);
        }
        if o.terms.len() == 1 && o.terms[0].0 == 1 {
            return self.mul_rational(&o.terms[0].1);
        }
        let mut v = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (r, a) in &self.terms {
            for (s, b) in &o.terms {
                let g = r.gcd(s);
                let rad = (r / g).checked_mul(s / g).expect("radicand overflow");
                v.push((rad, a * b * Rational::from_integer(BigInt::from(g))));
            }
        }
        TowerExt::from_terms(v)
    }
}

impl Div<&TowerExt> for &TowerExt {
    type Output = TowerExt;
    /// Panics on division by zero; use [`TowerExt::inv`] for a checked version.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &TowerExt) -> TowerExt {
        if let Some(q) = o.as_rational() {
            return self.mul_rational(&q.recip());
        }
        self * &o.inv().expect("TowerExt division by zero")
    }
}

forward_owned!(TowerExt, Add add, Sub sub, Mul mul, Div div);
