//! Exact arithmetic: rationals, `Q(√D)`, and sparse multi-quadratic towers.

mod enclosure;
mod quad;
mod rational;
mod scalar;
mod tower;

pub use enclosure::{sqrt_floor_scaled, Enclosure};
pub use quad::{qsign, squarefree_part, QuadExt};
pub use rational::{format_rational, int, parse_rational, rat, rsign, serde_rational, Rational, RationalRepr};
pub(crate) use rational::bits;
pub use scalar::{EigenScalar, Scalar};
pub use tower::{tsign, TowerExt};

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::ops::{Mul, Neg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    pub fn as_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

impl From<Ordering> for Sign {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        match (self, o) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}
