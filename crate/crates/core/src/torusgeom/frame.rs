use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::Pt;
use crate::automorphism::ToralAuto;
use crate::error::Error;
use crate::numbers::{EigenScalar, Enclosure};

/// Working precision (fractional bits) for lattice-range pruning. Pruning is
/// outward-rounded, so this only affects how many candidates get checked exactly.
pub(crate) const PRUNE_PREC: u32 = 128;

/// Coordinates `(u, w)` with `p = u·v₊ + w·v₋`, where `v± = (1, s±)`.
///
/// Since both basis vectors have first coordinate 1, `x = u + w` in every frame.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenFrame<K> {
    pub s_plus: K,
    pub s_minus: K,
    /// `s₋ − s₊`
    gap: K,
    inv_gap: K,
}

/// A lattice vector together with its frame coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeHit<K> {
    pub k: (i64, i64),
    pub u: K,
    pub w: K,
}

impl<K: EigenScalar> EigenFrame<K> {
    pub fn of(t: &ToralAuto) -> Self {
        Self::from_slopes(K::from_quad(&t.slope_plus), K::from_quad(&t.slope_minus))
            .expect("eigendirections of a hyperbolic map are distinct")
    }

    pub fn from_slopes(s_plus: K, s_minus: K) -> Result<Self, Error> {
        let gap = s_minus.clone() - s_plus.clone();
        let inv_gap = gap.checked_recip()?;
        Ok(EigenFrame { s_plus, s_minus, gap, inv_gap })
    }

    pub fn v_plus(&self) -> Pt<K> {
        (K::one(), self.s_plus.clone())
    }

    pub fn v_minus(&self) -> Pt<K> {
        (K::one(), self.s_minus.clone())
    }

    pub fn to_frame(&self, p: &Pt<K>) -> (K, K) {
        let w = (p.1.clone() - self.s_plus.clone() * p.0.clone()) * self.inv_gap.clone();
        let u = p.0.clone() - w.clone();
        (u, w)
    }

    pub fn from_frame(&self, u: &K, w: &K) -> Pt<K> {
        (u.clone() + w.clone(), u.clone() * self.s_plus.clone() + w.clone() * self.s_minus.clone())
    }

    pub fn lattice_frame(&self, k: (i64, i64)) -> (K, K) {
        self.to_frame(&(K::from_int(k.0), K::from_int(k.1)))
    }

    /// Every `k ∈ Z²` whose frame coordinates lie in the closed box `[u0,u1]×[w0,w1]`.
    ///
    /// Candidates are pruned with outward-rounded enclosures and then confirmed
    /// exactly, so the result is complete and contains nothing extra.
    pub fn lattice_in_box(&self, u0: &K, u1: &K, w0: &K, w1: &K) -> Vec<LatticeHit<K>> {
        let mut out = vec![];
        for k in self.lattice_candidates_box(u0, u1, w0, w1) {
            let (u, w) = self.lattice_frame(k);
            if u0.le(&u) && u.le(u1) && w0.le(&w) && w.le(w1) {
                out.push(LatticeHit { k, u, w });
            }
        }
        out
    }

    /// Superset of the lattice vectors in the closed box, from enclosures only.
    pub fn lattice_candidates_box(&self, u0: &K, u1: &K, w0: &K, w1: &K) -> Vec<(i64, i64)> {
        let p = PRUNE_PREC;
        self.lattice_candidates_enc(&u0.enclose(p), &u1.enclose(p), &w0.enclose(p), &w1.enclose(p))
    }

    /// `1/(s₋ − s₊)`
    pub fn inv_gap(&self) -> &K {
        &self.inv_gap
    }

    /// As [`Self::lattice_candidates_box`], for bounds given as enclosures at `PRUNE_PREC`.
    pub fn lattice_candidates_enc(&self, eu0: &Enclosure, eu1: &Enclosure, ew0: &Enclosure, ew1: &Enclosure) -> Vec<(i64, i64)> {
        let p = PRUNE_PREC;
        let x_lo = eu0.add(ew0).ceil_lower();
        let x_hi = eu1.add(ew1).floor_upper();
        let sp = self.s_plus.enclose(p);
        let g = self.gap.enclose(p);
        let mut out = vec![];
        let (Some(a), Some(b)) = (x_lo.to_i64(), x_hi.to_i64()) else {
            panic!("lattice search range does not fit in i64");
        };
        for k1 in a..=b {
            let kk = BigInt::from(k1) << p as usize;
            // w also satisfies w = x − u ∈ [k1 − u1, k1 − u0]
            let lo = ew0.lo.clone().max(&kk - &eu1.hi);
            let hi = ew1.hi.clone().min(&kk - &eu0.lo);
            if lo > hi {
                continue;
            }
            let wr = Enclosure { lo, hi, prec: p };
            let k2r = sp.scale_int(&BigInt::from(k1)).add(&g.mul(&wr));
            let (Some(c), Some(d)) = (k2r.ceil_lower().to_i64(), k2r.floor_upper().to_i64()) else {
                panic!("lattice search range does not fit in i64");
            };
            for k2 in c..=d {
                out.push((k1, k2));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, Scalar, TowerExt};

    fn frame() -> EigenFrame<TowerExt> {
        EigenFrame::of(&ToralAuto::analyze([[2, 1], [1, 1]]).unwrap())
    }

    #[test]
    fn basis_coordinates() {
        let f = frame();
        let (u, w) = f.to_frame(&f.v_plus());
        assert_eq!((u, w), (TowerExt::from_int(1), TowerExt::from_int(0)));
        let (u, w) = f.to_frame(&(TowerExt::from_int(1), TowerExt::from_int(0)));
        assert_eq!(u + w, TowerExt::from_int(1));
        let p = (TowerExt::from_rational(rat(1, 3)), TowerExt::sqrt(5));
        let (u, w) = f.to_frame(&p);
        assert_eq!(f.from_frame(&u, &w), p);
    }

    #[test]
    fn box_enumeration_matches_scan() {
        let f = frame();
        let q = |a, b| TowerExt::from_rational(rat(a, b));
        let (u0, u1, w0, w1) = (q(-3, 2), q(5, 2), q(-2, 1), q(7, 3));
        let got: Vec<_> = f.lattice_in_box(&u0, &u1, &w0, &w1).into_iter().map(|h| h.k).collect();
        let mut want = vec![];
        for k1 in -10..=10 {
            for k2 in -10..=10 {
                let (u, w) = f.lattice_frame((k1, k2));
                if u0.le(&u) && u.le(&u1) && w0.le(&w) && w.le(&w1) {
                    want.push((k1, k2));
                }
            }
        }
        assert_eq!(got, want);
        assert!(!got.is_empty());
    }
}
