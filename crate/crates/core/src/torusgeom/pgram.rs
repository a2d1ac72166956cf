use serde::{Deserialize, Serialize};

use super::{padd, pscale, psub, Axis, EigenFrame, EigenSegment, LatticeHit, Pt, PRUNE_PREC};
use crate::error::Error;
use crate::numbers::EigenScalar;

/// Which faces are excluded. `u_lo` is the face `u = u.0`, and so on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceFlags {
    pub u_lo: bool,
    pub u_hi: bool,
    pub w_lo: bool,
    pub w_hi: bool,
}

impl FaceFlags {
    pub const OPEN: FaceFlags = FaceFlags { u_lo: true, u_hi: true, w_lo: true, w_hi: true };
    pub const CLOSED: FaceFlags = FaceFlags { u_lo: false, u_hi: false, w_lo: false, w_hi: false };
}

/// `{anchor + u·v₊ + w·v₋ : u ∈ u-extent, w ∈ w-extent}` projected to the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenParallelogram<K> {
    pub frame: EigenFrame<K>,
    pub anchor: Pt<K>,
    pub u: (K, K),
    pub w: (K, K),
    pub open: FaceFlags,
}

pub(crate) fn in_range<K: EigenScalar>(x: &K, lo: &K, hi: &K, lo_open: bool, hi_open: bool) -> bool {
    let a = lo.cmp_to(x);
    let b = x.cmp_to(hi);
    (a.is_lt() || (a.is_eq() && !lo_open)) && (b.is_lt() || (b.is_eq() && !hi_open))
}

impl<K: EigenScalar> EigenParallelogram<K> {
    pub fn new(frame: EigenFrame<K>, anchor: Pt<K>, u: (K, K), w: (K, K), open: FaceFlags) -> Result<Self, Error> {
        if !u.0.lt(&u.1) || !w.0.lt(&w.1) {
            return Err(Error::InvalidInput("parallelogram extents must satisfy lo < hi".into()));
        }
        Ok(EigenParallelogram { frame, anchor, u, w, open })
    }

    pub fn with_open(&self, open: FaceFlags) -> Self {
        EigenParallelogram { open, ..self.clone() }
    }

    pub fn closure(&self) -> Self {
        self.with_open(FaceFlags::CLOSED)
    }

    /// Frame coordinates of `p` relative to the anchor.
    pub fn rel(&self, p: &Pt<K>) -> (K, K) {
        self.frame.to_frame(&psub(p, &self.anchor))
    }

    pub fn point_at(&self, u: &K, w: &K) -> Pt<K> {
        padd(&self.anchor, &self.frame.from_frame(u, w))
    }

    pub fn contains_frame(&self, u: &K, w: &K) -> bool {
        in_range(u, &self.u.0, &self.u.1, self.open.u_lo, self.open.u_hi)
            && in_range(w, &self.w.0, &self.w.1, self.open.w_lo, self.open.w_hi)
    }

    /// Lattice vectors `k` with `p + k` in this (closed) parallelogram.
    pub fn closed_lifts(&self, p: &Pt<K>) -> Vec<LatticeHit<K>> {
        let (pu, pw) = self.rel(p);
        self.frame.lattice_in_box(
            &(self.u.0.clone() - pu.clone()),
            &(self.u.1.clone() - pu),
            &(self.w.0.clone() - pw.clone()),
            &(self.w.1.clone() - pw),
        )
    }

    /// The lift `k` with `p + k ∈ P`, respecting open faces.
    pub fn membership_lift(&self, p: &Pt<K>) -> Option<(i64, i64)> {
        // enclosure prefilter; exact coordinates only for surviving candidates
        let prec = PRUNE_PREC;
        let d = psub(p, &self.anchor);
        let (x, y) = (d.0.enclose(prec), d.1.enclose(prec));
        let (sp, ig) = (self.frame.s_plus.enclose(prec), self.frame.inv_gap().enclose(prec));
        let w = y.sub(&sp.mul(&x)).mul(&ig);
        let u = x.sub(&w);
        let e = |b: &K| b.enclose(prec);
        let ks = self.frame.lattice_candidates_enc(
            &e(&self.u.0).sub(&u),
            &e(&self.u.1).sub(&u),
            &e(&self.w.0).sub(&w),
            &e(&self.w.1).sub(&w),
        );
        if ks.is_empty() {
            return None;
        }
        let (pu, pw) = self.frame.to_frame(&d);
        ks.into_iter().find(|&k| {
            let (ku, kw) = self.frame.lattice_frame(k);
            self.contains_frame(&(pu.clone() + ku), &(pw.clone() + kw))
        })
    }

    pub fn contains(&self, p: &Pt<K>) -> bool {
        self.membership_lift(p).is_some()
    }

    pub fn vertices(&self) -> [Pt<K>; 4] {
        [
            self.point_at(&self.u.0, &self.w.0),
            self.point_at(&self.u.1, &self.w.0),
            self.point_at(&self.u.1, &self.w.1),
            self.point_at(&self.u.0, &self.w.1),
        ]
    }

    pub fn center(&self) -> Pt<K> {
        self.point_at(&(self.u.0.clone() + self.u.1.clone()).half(), &(self.w.0.clone() + self.w.1.clone()).half())
    }

    pub fn u_len(&self) -> K {
        self.u.1.clone() - self.u.0.clone()
    }

    pub fn w_len(&self) -> K {
        self.w.1.clone() - self.w.0.clone()
    }

    /// Contracting face `u = u.0` (or `u = u.1` when `primed`), as a segment along v₋.
    pub fn u_face(&self, primed: bool) -> EigenSegment<K> {
        let u = if primed { &self.u.1 } else { &self.u.0 };
        EigenSegment {
            frame: self.frame.clone(),
            anchor: self.point_at(u, &self.w.0),
            axis: Axis::Minus,
            t: (K::zero(), self.w_len()),
            open: (self.open.w_lo, self.open.w_hi),
        }
    }

    /// Expanding face `w = w.0` (or `w = w.1` when `primed`), as a segment along v₊.
    pub fn w_face(&self, primed: bool) -> EigenSegment<K> {
        let w = if primed { &self.w.1 } else { &self.w.0 };
        EigenSegment {
            frame: self.frame.clone(),
            anchor: self.point_at(&self.u.0, w),
            axis: Axis::Plus,
            t: (K::zero(), self.u_len()),
            open: (self.open.u_lo, self.open.u_hi),
        }
    }
}

/// The connected piece of `P ∩ E⁺(z)` containing `z`.
///
/// `x` and `x_prime` are the endpoints on the `u.0` and `u.1` sides, expressed
/// as lifts adjacent to the given lift of `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice<K> {
    pub segment: EigenSegment<K>,
    pub x: Pt<K>,
    pub x_prime: Pt<K>,
    /// Lift with `z + k` in the parallelogram.
    pub k: (i64, i64),
    /// Frame coordinates of `z + k` relative to the anchor.
    pub at: (K, K),
}

impl<K: EigenScalar> Slice<K> {
    /// Length in units of `v₊`.
    pub fn length(&self) -> K {
        self.segment.t.1.clone() - self.segment.t.0.clone()
    }
}

pub fn slice_through<K: EigenScalar>(z: &Pt<K>, p: &EigenParallelogram<K>) -> Result<Slice<K>, Error> {
    let k = p.membership_lift(z).ok_or(Error::PointNotInTube)?;
    let (zu, zw) = p.rel(z);
    let (ku, kw) = p.frame.lattice_frame(k);
    let at = (zu + ku, zw + kw);
    let vp = p.frame.v_plus();
    let x = padd(z, &pscale(&vp, &(p.u.0.clone() - at.0.clone())));
    let x_prime = padd(z, &pscale(&vp, &(p.u.1.clone() - at.0.clone())));
    let segment = EigenSegment {
        frame: p.frame.clone(),
        anchor: x.clone(),
        axis: Axis::Plus,
        t: (K::zero(), p.u_len()),
        open: (p.open.u_lo, p.open.u_hi),
    };
    Ok(Slice { segment, x, x_prime, k, at })
}
