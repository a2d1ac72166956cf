use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::pgram::in_range;
use super::{padd, pscale, psub, EigenFrame, EigenParallelogram, Pt, PRUNE_PREC};
use crate::error::Error;
use crate::numbers::{EigenScalar, Enclosure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Plus,
    Minus,
}

/// `{anchor + t·v : t ∈ t-extent}` with `v = v₊` or `v₋` of the frame.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSegment<K> {
    pub frame: EigenFrame<K>,
    pub anchor: Pt<K>,
    pub axis: Axis,
    pub t: (K, K),
    /// Whether the `t.0` and `t.1` ends are excluded.
    pub open: (bool, bool),
}

impl<K: EigenScalar> EigenSegment<K> {
    pub fn direction(&self) -> Pt<K> {
        match self.axis {
            Axis::Plus => self.frame.v_plus(),
            Axis::Minus => self.frame.v_minus(),
        }
    }

    pub fn point_at(&self, t: &K) -> Pt<K> {
        padd(&self.anchor, &pscale(&self.direction(), t))
    }

    pub fn endpoints(&self) -> (Pt<K>, Pt<K>) {
        (self.point_at(&self.t.0), self.point_at(&self.t.1))
    }

    pub fn midpoint(&self) -> Pt<K> {
        self.point_at(&(self.t.0.clone() + self.t.1.clone()).half())
    }

    /// Length in units of the direction vector.
    pub fn param_len(&self) -> K {
        self.t.1.clone() - self.t.0.clone()
    }

    pub fn contains_param(&self, t: &K) -> bool {
        in_range(t, &self.t.0, &self.t.1, self.open.0, self.open.1)
    }

    pub fn restrict(&self, iv: &TInterval<K>) -> EigenSegment<K> {
        EigenSegment {
            frame: self.frame.clone(),
            anchor: super::plattice(&self.anchor, iv.k),
            axis: self.axis,
            t: (iv.lo.clone(), iv.hi.clone()),
            open: (iv.lo_open, iv.hi_open),
        }
    }

    /// Same segment with the parameter origin moved to `t.0` and the anchor reduced to `[0,1)²`.
    pub fn canonical(&self) -> EigenSegment<K> {
        let start = self.point_at(&self.t.0);
        EigenSegment {
            frame: self.frame.clone(),
            anchor: super::reduce(&start),
            axis: self.axis,
            t: (K::zero(), self.param_len()),
            open: self.open,
        }
    }
}

/// A parameter interval together with the lattice vector of the lift it lives on.
#[derive(Clone, Debug, PartialEq)]
pub struct TInterval<K> {
    pub lo: K,
    pub hi: K,
    pub lo_open: bool,
    pub hi_open: bool,
    pub k: (i64, i64),
}

impl<K: EigenScalar> TInterval<K> {
    pub fn is_empty(&self) -> bool {
        match self.lo.cmp_to(&self.hi) {
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => self.lo_open || self.hi_open,
            std::cmp::Ordering::Greater => true,
        }
    }

    pub fn contains(&self, t: &K) -> bool {
        in_range(t, &self.lo, &self.hi, self.lo_open, self.hi_open)
    }

    fn clip_lo(&mut self, v: K, open: bool) {
        match v.cmp_to(&self.lo) {
            std::cmp::Ordering::Greater => {
                self.lo = v;
                self.lo_open = open;
            }
            std::cmp::Ordering::Equal => self.lo_open |= open,
            std::cmp::Ordering::Less => {}
        }
    }

    fn clip_hi(&mut self, v: K, open: bool) {
        match v.cmp_to(&self.hi) {
            std::cmp::Ordering::Less => {
                self.hi = v;
                self.hi_open = open;
            }
            std::cmp::Ordering::Equal => self.hi_open |= open,
            std::cmp::Ordering::Greater => {}
        }
    }

    /// Intersects with `{t : c0 + c1·t ∈ [lo, hi]}`; `inv_c1` is `1/c1` when `c1 ≠ 0`.
    #[allow(clippy::too_many_arguments)]
    fn constrain(&mut self, c0: &K, c1: &K, inv_c1: Option<&K>, lo: &K, hi: &K, lo_open: bool, hi_open: bool) -> bool {
        match inv_c1 {
            None => {
                debug_assert!(c1.sign().is_zero());
                in_range(c0, lo, hi, lo_open, hi_open)
            }
            Some(inv) => {
                let a = (lo.clone() - c0.clone()) * inv.clone();
                let b = (hi.clone() - c0.clone()) * inv.clone();
                if c1.is_pos() {
                    self.clip_lo(a, lo_open);
                    self.clip_hi(b, hi_open);
                } else {
                    self.clip_lo(b, hi_open);
                    self.clip_hi(a, lo_open);
                }
                !self.is_empty()
            }
        }
    }
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("lattice search range does not fit in i64")
}

/// Parameter intervals of `anchor + t·dir` (over every lattice translate) that
/// lie in `p`. `dir` must be nonzero.
///
/// Candidate translates come from enclosures alone; exact arithmetic is only
/// spent when some candidate survives.
pub fn line_pgram_intersect<K: EigenScalar>(
    anchor: &Pt<K>,
    dir: &Pt<K>,
    t: (&K, &K),
    open: (bool, bool),
    p: &EigenParallelogram<K>,
) -> Vec<TInterval<K>> {
    let whole = TInterval { lo: t.0.clone(), hi: t.1.clone(), lo_open: open.0, hi_open: open.1, k: (0, 0) };
    if whole.is_empty() {
        return vec![];
    }
    let a = psub(anchor, &p.anchor);
    let (du, dw) = p.frame.to_frame(dir);
    let aligned = du.sign().is_zero() || dw.sign().is_zero();
    let ks = candidates(&a, dir, t, p, aligned);
    if ks.is_empty() {
        return vec![];
    }
    let (au, aw) = p.frame.to_frame(&a);
    let inv_du = (!du.sign().is_zero()).then(|| du.checked_recip().unwrap());
    let inv_dw = (!dw.sign().is_zero()).then(|| dw.checked_recip().unwrap());
    let mut out = vec![];
    for k in ks {
        let (ku, kw) = p.frame.lattice_frame(k);
        let mut iv = TInterval { k, ..whole.clone() };
        let (cu, cw) = (au.clone() + ku, aw.clone() + kw);
        if iv.constrain(&cu, &du, inv_du.as_ref(), &p.u.0, &p.u.1, p.open.u_lo, p.open.u_hi)
            && iv.constrain(&cw, &dw, inv_dw.as_ref(), &p.w.0, &p.w.1, p.open.w_lo, p.open.w_hi)
        {
            out.push(iv);
        }
    }
    out
}

/// Lattice vectors `k` for which `a + t·dir + k` may meet the closed parallelogram
/// (anchor-relative `a`). A superset, from outward-rounded enclosures only.
fn candidates<K: EigenScalar>(
    a: &Pt<K>,
    dir: &Pt<K>,
    t: (&K, &K),
    p: &EigenParallelogram<K>,
    aligned: bool,
) -> Vec<(i64, i64)> {
    let prec = PRUNE_PREC;
    let f = &p.frame;
    let (sp, ig) = (f.s_plus.enclose(prec), f.inv_gap().enclose(prec));
    // w = (y − s₊x)/(s₋ − s₊), u = x − w
    let frame_enc = |x: &Enclosure, y: &Enclosure| {
        let w = y.sub(&sp.mul(x)).mul(&ig);
        (x.sub(&w), w)
    };
    let (ax, ay) = (a.0.enclose(prec), a.1.enclose(prec));
    let (dx, dy) = (dir.0.enclose(prec), dir.1.enclose(prec));
    let (t0, t1) = (t.0.enclose(prec), t.1.enclose(prec));
    let (au, aw) = frame_enc(&ax, &ay);
    let (du, dw) = frame_enc(&dx, &dy);
    let sweep = |d: &Enclosure| t0.mul(d).hull(&t1.mul(d));
    let (su, sw) = (sweep(&du), sweep(&dw));
    // k must satisfy u0 ≤ au + t·du + ku ≤ u1 for some t, and the same for w
    let (u0, u1) = (p.u.0.enclose(prec), p.u.1.enclose(prec));
    let (w0, w1) = (p.w.0.enclose(prec), p.w.1.enclose(prec));
    let ku = (u0.sub(&au).sub(&su), u1.sub(&au).sub(&su));
    let kw = (w0.sub(&aw).sub(&sw), w1.sub(&aw).sub(&sw));
    if aligned {
        // eigen-aligned: the swept frame box is tight
        return f.lattice_candidates_enc(&ku.0, &ku.1, &kw.0, &kw.1);
    }
    // otherwise walk k1 = x-translate and bound k2 from the line's y-range on that strip
    let Some(idx) = dx.recip() else {
        return f.lattice_candidates_enc(&ku.0, &ku.1, &kw.0, &kw.1);
    };
    let x0 = u0.add(&w0);
    let x1 = u1.add(&w1);
    let ys: Vec<Enclosure> = p.vertices().iter().map(|v| psub(v, &p.anchor).1.enclose(prec)).collect();
    let y_all = ys[1..].iter().fold(ys[0].clone(), |h, e| h.hull(e));
    let tdx = sweep(&dx);
    let k1_lo = to_i64(&x0.sub(&ax).sub(&tdx).ceil_lower());
    let k1_hi = to_i64(&x1.sub(&ax).sub(&tdx).floor_upper());
    let mut out = vec![];
    for k1 in k1_lo..=k1_hi {
        let kk = Enclosure::of_integer(&BigInt::from(k1), prec);
        // t with x(t) + k1 in the parallelogram's x-range
        let tr = x0.sub(&ax).sub(&kk).mul(&idx).hull(&x1.sub(&ax).sub(&kk).mul(&idx));
        let lo = (&tr.lo).max(&t0.lo).clone();
        let hi = (&tr.hi).min(&t1.hi).clone();
        if lo > hi {
            continue;
        }
        let tr = Enclosure { lo, hi, prec };
        let yr = ay.add(&tr.mul(&dy));
        let c = to_i64(&Enclosure { lo: &y_all.lo - &yr.hi, hi: &y_all.lo - &yr.hi, prec }.ceil_lower());
        let d = to_i64(&Enclosure { lo: &y_all.hi - &yr.lo, hi: &y_all.hi - &yr.lo, prec }.floor_upper());
        for k2 in c..=d {
            let w = Enclosure::of_integer(&BigInt::from(k2), prec).sub(&sp.scale_int(&BigInt::from(k1))).mul(&ig);
            let u = kk.sub(&w);
            if overlaps(&u, &ku) && overlaps(&w, &kw) {
                out.push((k1, k2));
            }
        }
    }
    out
}

fn overlaps(x: &Enclosure, r: &(Enclosure, Enclosure)) -> bool {
    x.hi >= r.0.lo && x.lo <= r.1.hi
}

/// Parameter intervals of `s` lying in `p`, over all lattice translates.
/// An empty result means the projected sets are disjoint.
pub fn segment_pgram_intersect<K: EigenScalar>(s: &EigenSegment<K>, p: &EigenParallelogram<K>) -> Vec<TInterval<K>> {
    line_pgram_intersect(&s.anchor, &s.direction(), (&s.t.0, &s.t.1), s.open, p)
}

/// `a(t) + k = b(s)` for two transversal lines.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossing<K> {
    pub t: K,
    pub s: K,
    pub k: (i64, i64),
    /// The crossing point as a lift near `b`.
    pub point: Pt<K>,
}

/// Solves `a + t·da + k = b + s·db` for lattice vectors `k`, one `k1` at a time.
///
/// `t` and `s` are affine in `k`: `t = t_c + k1·t1 + k2·t2`, same for `s`.
pub struct CrossingSolver<K> {
    a: Pt<K>,
    da: Pt<K>,
    b: Pt<K>,
    db: Pt<K>,
    s_range: (K, K),
    s_open: (bool, bool),
    coef_t: (K, K, K),
    coef_s: (K, K, K),
    /// Enclosures of `s_c`, `s1` and `1/s2`.
    enc_s: (Enclosure, Enclosure, Enclosure),
    enc_srange: (Enclosure, Enclosure),
}

impl<K: EigenScalar> CrossingSolver<K> {
    /// Line `a + t·da` (unbounded) against the segment `b + s·db`, `s ∈ s_range`.
    pub fn new(a: Pt<K>, da: Pt<K>, b: Pt<K>, db: Pt<K>, s_range: (K, K), s_open: (bool, bool)) -> Result<Self, Error> {
        // t·da − s·db = (b − a) − k
        let det = db.0.clone() * da.1.clone() - da.0.clone() * db.1.clone();
        let inv = det.checked_recip().map_err(|_| Error::TransversalityViolated)?;
        let (rx, ry) = psub(&b, &a);
        // t = (−db.y·rx + db.x·ry)/det ; s = (−da.y·rx + da.x·ry)/det, with rx −= k1, ry −= k2
        let t_c = (db.0.clone() * ry.clone() - db.1.clone() * rx.clone()) * inv.clone();
        let t1 = db.1.clone() * inv.clone();
        let t2 = -(db.0.clone() * inv.clone());
        let s_c = (da.0.clone() * ry - da.1.clone() * rx) * inv.clone();
        let s1 = da.1.clone() * inv.clone();
        let s2 = -(da.0.clone() * inv);
        let p = PRUNE_PREC;
        let inv_s2 = s2.checked_recip().map_err(|_| Error::TransversalityViolated)?;
        let enc_s = (s_c.enclose(p), s1.enclose(p), inv_s2.enclose(p));
        let enc_srange = (s_range.0.enclose(p), s_range.1.enclose(p));
        Ok(CrossingSolver {
            a,
            da,
            b,
            db,
            s_range,
            s_open,
            coef_t: (t_c, t1, t2),
            coef_s: (s_c, s1, s2),
            enc_s,
            enc_srange,
        })
    }

    /// The `k1` for which `t ≈ 0`; `|t|` grows roughly linearly away from it.
    pub fn k1_center(&self) -> i64 {
        let mid = (self.s_range.0.clone() + self.s_range.1.clone()).half();
        let x = self.b.0.clone() + mid * self.db.0.clone() - self.a.0.clone();
        to_i64(&x.floor())
    }

    /// Upper bound on how far `t·da.x` can stray from `k1_center − k1` (target extent in x plus rounding).
    pub fn k1_slack(&self) -> i64 {
        let ext = (self.s_range.1.clone() - self.s_range.0.clone()).abs_val() * self.db.0.abs_val();
        to_i64(&ext.floor()) + 2
    }

    pub fn t_of(&self, k: (i64, i64)) -> K {
        let (c, a1, a2) = &self.coef_t;
        c.clone() + a1.clone() * K::from_int(k.0) + a2.clone() * K::from_int(k.1)
    }

    pub fn s_of(&self, k: (i64, i64)) -> K {
        let (c, a1, a2) = &self.coef_s;
        c.clone() + a1.clone() * K::from_int(k.0) + a2.clone() * K::from_int(k.1)
    }

    /// All crossings with the segment for this `k1`, any `t`.
    pub fn crossings_at_k1(&self, k1: i64) -> Vec<Crossing<K>> {
        let (sc, s1, inv_s2) = &self.enc_s;
        // s = sc + k1·s1 + k2·s2 ∈ [s0, s1]  ⇒  k2·s2 ∈ [s0 − sc − k1·s1, s1 − sc − k1·s1]
        let base = sc.add(&s1.scale_int(&BigInt::from(k1)));
        let lo = self.enc_srange.0.sub(&base);
        let hi = self.enc_srange.1.sub(&base);
        let q = lo.mul(inv_s2).hull(&hi.mul(inv_s2));
        let mut out = vec![];
        for k2 in to_i64(&q.ceil_lower())..=to_i64(&q.floor_upper()) {
            let k = (k1, k2);
            let s = self.s_of(k);
            if !in_range(&s, &self.s_range.0, &self.s_range.1, self.s_open.0, self.s_open.1) {
                continue;
            }
            let t = self.t_of(k);
            let point = padd(&self.b, &pscale(&self.db, &s));
            debug_assert!(super::torus_eq(&point, &padd(&self.a, &pscale(&self.da, &t))));
            out.push(Crossing { t, s, k, point });
        }
        out
    }
}

/// Every crossing of two transversal segments on the torus.
pub fn segment_crossings<K: EigenScalar>(a: &EigenSegment<K>, b: &EigenSegment<K>) -> Result<Vec<Crossing<K>>, Error> {
    let solver = CrossingSolver::new(a.anchor.clone(), a.direction(), b.anchor.clone(), b.direction(), b.t.clone(), b.open)?;
    // x-range of k1: b.x + s·db.x − a.x − t·da.x
    let p = PRUNE_PREC;
    let (dax, dbx) = (a.direction().0.enclose(p), b.direction().0.enclose(p));
    let sx = b.t.0.enclose(p).mul(&dbx).hull(&b.t.1.enclose(p).mul(&dbx));
    let tx = a.t.0.enclose(p).mul(&dax).hull(&a.t.1.enclose(p).mul(&dax));
    let base = b.anchor.0.enclose(p).sub(&a.anchor.0.enclose(p));
    let lo = base.add(&sx).sub(&tx);
    let mut out = vec![];
    for k1 in to_i64(&lo.ceil_lower())..=to_i64(&lo.floor_upper()) {
        for c in solver.crossings_at_k1(k1) {
            if a.contains_param(&c.t) {
                out.push(c);
            }
        }
    }
    Ok(out)
}
