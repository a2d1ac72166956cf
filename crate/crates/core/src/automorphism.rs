//! Hyperbolicity analysis, eigen-data, rational orbits and positivization.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numbers::{serde_rational, squarefree_part, QuadExt, Rational, Scalar, TowerExt};

pub type Mat2 = [[i64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0]
                .checked_mul(b[0][j])
                .and_then(|x| a[i][1].checked_mul(b[1][j]).and_then(|y| x.checked_add(y)))
                .expect("matrix entry overflow");
        }
    }
    c
}

pub fn mat_pow(a: &Mat2, e: u32) -> Mat2 {
    let mut acc = [[1, 0], [0, 1]];
    for _ in 0..e {
        acc = mat_mul(&acc, a);
    }
    acc
}

/// Parses `a,b,c,d` (row-major) or JSON `[[a,b],[c,d]]`.
pub fn parse_matrix(s: &str) -> Result<Mat2, Error> {
    let cleaned: String = s.chars().map(|c| if "[]".contains(c) { ' ' } else { c }).collect();
    let v: Result<Vec<i64>, _> = cleaned
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect();
    match v {
        Ok(v) if v.len() == 4 => Ok([[v[0], v[1]], [v[2], v[3]]]),
        _ => Err(Error::Parse(format!("expected four integers a,b,c,d, got {s:?}"))),
    }
}

/// Hyperbolic unimodular 2×2 integer matrix with exact eigen-data.
///
/// Eigenvectors are `v± = (1, s±)`. The top-right entry of a hyperbolic
/// matrix is never 0 (a triangular unimodular matrix has eigenvalues ±1), so
/// neither eigendirection is vertical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AutoRepr")]
pub struct ToralAuto {
    pub matrix: Mat2,
    pub det: i64,
    pub trace: i64,
    /// Square-free core of `trace² − 4·det`.
    #[serde(rename = "D")]
    pub d: u64,
    pub lambda_plus: QuadExt,
    pub lambda_minus: QuadExt,
    pub slope_plus: QuadExt,
    pub slope_minus: QuadExt,
}

#[derive(Deserialize)]
struct AutoRepr {
    matrix: Mat2,
}

impl TryFrom<AutoRepr> for ToralAuto {
    type Error = Error;
    fn try_from(r: AutoRepr) -> Result<Self, Error> {
        ToralAuto::analyze(r.matrix)
    }
}

impl fmt::Display for ToralAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.matrix;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl ToralAuto {
    pub fn analyze(m: Mat2) -> Result<Self, Error> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(Error::NotUnimodular);
        }
        let trace = m[0][0] + m[1][1];
        // det = 1: |λ| = 1 iff |tr| ≤ 2.  det = −1: roots are ±1 iff tr = 0.
        let hyperbolic = if det == 1 { trace.abs() > 2 } else { trace != 0 };
        if !hyperbolic {
            return Err(Error::NotHyperbolic);
        }
        let disc = (trace * trace - 4 * det) as u64;
        let (f, d) = squarefree_part(disc);
        debug_assert!(d > 1);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let sgn = trace.signum();
        let tr = Rational::from_integer(BigInt::from(trace));
        let root = Rational::from_integer(BigInt::from(sgn * f as i64));
        let lambda_plus = QuadExt::new(&tr * &half, &root * &half, d);
        let lambda_minus = QuadExt::new(&tr * &half, -(&root * &half), d);
        let a = QuadExt::from_int(m[0][0]);
        let b = QuadExt::from_int(m[0][1]);
        let slope_plus = &(&lambda_plus - &a) / &b;
        let slope_minus = &(&lambda_minus - &a) / &b;
        Ok(ToralAuto { matrix: m, det, trace, d, lambda_plus, lambda_minus, slope_plus, slope_minus })
    }

    pub fn inverse_matrix(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.matrix;
        let s = self.det;
        [[s * d, -s * b], [-s * c, s * a]]
    }

    pub fn has_positive_eigenvalues(&self) -> bool {
        self.lambda_plus.sign().is_positive() && self.lambda_minus.sign().is_positive()
    }

    /// `(T, 1)` when both eigenvalues are positive, else `(T², 2)`.
    pub fn positivize(&self) -> (ToralAuto, u32) {
        if self.has_positive_eigenvalues() {
            (self.clone(), 1)
        } else {
            let sq = ToralAuto::analyze(mat_mul(&self.matrix, &self.matrix))
                .expect("square of a hyperbolic automorphism is hyperbolic");
            (sq, 2)
        }
    }

    pub fn power(&self, e: u32) -> ToralAuto {
        ToralAuto::analyze(mat_pow(&self.matrix, e.max(1))).expect("power of hyperbolic map is hyperbolic")
    }

    pub fn apply<K: Scalar>(&self, p: &(K, K)) -> (K, K) {
        apply_matrix(&self.matrix, p)
    }

    pub fn apply_inverse<K: Scalar>(&self, p: &(K, K)) -> (K, K) {
        apply_matrix(&self.inverse_matrix(), p)
    }

    /// `M·v± − λ±·v±` (both coordinates) and `λ₊λ₋ − det`, `λ₊+λ₋ − trace`.
    /// All entries are zero for correct eigen-data.
    pub fn eigen_residuals(&self) -> Vec<QuadExt> {
        let [[a, b], [c, d]] = self.matrix.map(|r| r.map(QuadExt::from_int));
        let mut out = vec![];
        for (lam, s) in [(&self.lambda_plus, &self.slope_plus), (&self.lambda_minus, &self.slope_minus)] {
            out.push(&(&a + &(&b * s)) - lam);
            out.push(&(&c + &(&d * s)) - &(lam * s));
        }
        out.push(&(&self.lambda_plus * &self.lambda_minus) - &QuadExt::from_int(self.det));
        out.push(&(&self.lambda_plus + &self.lambda_minus) - &QuadExt::from_int(self.trace));
        out
    }

    pub fn orbit(&self, p: &RationalPoint) -> Vec<RationalPoint> {
        orbit_and_period(p, self)
    }
}

pub fn apply_matrix<K: Scalar>(m: &Mat2, p: &(K, K)) -> (K, K) {
    let e = |i: usize, j: usize| K::from_int(m[i][j]);
    (
        e(0, 0) * p.0.clone() + e(0, 1) * p.1.clone(),
        e(1, 0) * p.0.clone() + e(1, 1) * p.1.clone(),
    )
}

/// Point of the torus with rational coordinates in `[0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
}

fn frac(q: &Rational) -> Rational {
    q - Rational::from_integer(q.numer().div_floor(q.denom()))
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RationalPoint { x: frac(&x), y: frac(&y) }
    }

    pub fn origin() -> Self {
        RationalPoint { x: Rational::zero(), y: Rational::zero() }
    }

    pub fn apply(&self, m: &Mat2) -> RationalPoint {
        let (x, y) = apply_matrix(m, &(self.x.clone(), self.y.clone()));
        RationalPoint::new(x, y)
    }

    pub fn to_tower(&self) -> (TowerExt, TowerExt) {
        (TowerExt::from_rational(self.x.clone()), TowerExt::from_rational(self.y.clone()))
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Least common denominator of the two coordinates.
    pub fn denominator(&self) -> BigInt {
        self.x.denom().lcm(self.y.denom())
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::numbers::format_rational as fr;
        write!(f, "({}, {})", fr(&self.x), fr(&self.y))
    }
}

/// Forward orbit `p, Tp, …` up to (excluding) the first return to `p`.
pub fn orbit_and_period(p: &RationalPoint, t: &ToralAuto) -> Vec<RationalPoint> {
    let p = RationalPoint::new(p.x.clone(), p.y.clone());
    let mut out = vec![p.clone()];
    let mut seen: HashSet<RationalPoint> = HashSet::from([p.clone()]);
    let mut cur = p.apply(&t.matrix);
    while cur != p {
        // unimodular maps are bijections on each denominator class, so the orbit is purely periodic
        assert!(seen.insert(cur.clone()), "orbit entered a cycle not containing its start");
        out.push(cur.clone());
        cur = cur.apply(&t.matrix);
    }
    out
}

/// True iff the contracting directions of `t` and `s` are not parallel.
pub fn check_transversality(t: &ToralAuto, s: &ToralAuto) -> bool {
    let diff = TowerExt::from_quad(&t.slope_minus) - TowerExt::from_quad(&s.slope_minus);
    !diff.sign().is_zero()
}

/// Pointwise check that the depth-`n` forward orbit of `(x, y)` under `m`
/// avoids a set; iterate 0 is the point itself.
pub fn orbit_avoids<K: Scalar>(
    m: &Mat2,
    p: &(K, K),
    n: usize,
    mut inside: impl FnMut(&(K, K)) -> bool,
) -> Option<usize> {
    let mut cur = reduce_mod1(p);
    for i in 0..=n {
        if inside(&cur) {
            return Some(i);
        }
        if i < n {
            cur = reduce_mod1(&apply_matrix(m, &cur));
        }
    }
    None
}

pub fn reduce_mod1<K: Scalar>(p: &(K, K)) -> (K, K) {
    (
        p.0.clone() - K::from_bigint(&p.0.floor()),
        p.1.clone() - K::from_bigint(&p.1.floor()),
    )
}
