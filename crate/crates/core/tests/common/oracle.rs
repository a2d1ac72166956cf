//! Fixed-point intervals at 300 fractional bits with a Newton square root.
//! Nothing here calls into the crate's own enclosure code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use toral_core::torusgeom::{Axis, EigenFrame, EigenParallelogram, EigenSegment, Pt};
use toral_core::{Rational, TowerExt};

pub const PREC: usize = 300;

/// `x·2^PREC ∈ [lo, hi]`
#[derive(Clone, Debug)]
pub struct Iv {
    pub lo: BigInt,
    pub hi: BigInt,
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `floor(√n)` by Newton iteration from above.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    if n.is_zero() {
        return BigInt::zero();
    }
    let mut x = BigInt::one() << (n.bits() as usize / 2 + 1);
    loop {
        let y = (&x + n / &x) >> 1usize;
        if y >= x {
            return x;
        }
        x = y;
    }
}

impl Iv {
    pub fn rat(q: &Rational) -> Iv {
        let s = q.numer() << PREC;
        Iv { lo: s.div_floor(q.denom()), hi: div_ceil(&s, q.denom()) }
    }

    pub fn int(n: i64) -> Iv {
        let v = BigInt::from(n) << PREC;
        Iv { lo: v.clone(), hi: v }
    }

    pub fn sqrt(r: u64) -> Iv {
        let s = isqrt(&(BigInt::from(r) << (2 * PREC)));
        let exact = &s * &s == BigInt::from(r) << (2 * PREC);
        let hi = if exact { s.clone() } else { &s + 1 };
        Iv { lo: s, hi }
    }

    pub fn tower(x: &TowerExt) -> Iv {
        x.terms().iter().fold(Iv::int(0), |acc, (r, c)| acc.add(&Iv::rat(c).mul(&Iv::sqrt(*r))))
    }

    pub fn add(&self, o: &Iv) -> Iv {
        Iv { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> Iv {
        Iv { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn sub(&self, o: &Iv) -> Iv {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Iv) -> Iv {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let d = BigInt::one() << PREC;
        Iv { lo: c.iter().min().unwrap().div_floor(&d), hi: div_ceil(c.iter().max().unwrap(), &d) }
    }

    /// `None` when the divisor straddles zero.
    pub fn div(&self, o: &Iv) -> Option<Iv> {
        if !(o.lo.is_positive() || o.hi.is_negative()) {
            return None;
        }
        let one = BigInt::one() << (2 * PREC);
        let inv = Iv { lo: one.div_floor(&o.hi), hi: div_ceil(&one, &o.lo) };
        Some(self.mul(&inv))
    }

    pub fn max(&self, o: &Iv) -> Iv {
        Iv { lo: (&self.lo).max(&o.lo).clone(), hi: (&self.hi).max(&o.hi).clone() }
    }

    pub fn min(&self, o: &Iv) -> Iv {
        Iv { lo: (&self.lo).min(&o.lo).clone(), hi: (&self.hi).min(&o.hi).clone() }
    }

    /// Decided `self < o`.
    pub fn lt(&self, o: &Iv) -> Option<bool> {
        if self.hi < o.lo {
            Some(true)
        } else if self.lo > o.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn contains(&self, o: &Iv) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn to_f64(&self) -> f64 {
        let mid: BigInt = (&self.lo + &self.hi) >> 1usize;
        let b = mid.bits() as i64;
        let shift = (b - 60).max(0);
        (&mid >> shift as usize).to_f64().unwrap() * 2f64.powi((shift - PREC as i64) as i32)
    }
}

pub struct OFrame {
    sp: Iv,
    sm: Iv,
    gap: Iv,
}

impl OFrame {
    pub fn of(f: &EigenFrame<TowerExt>) -> OFrame {
        let sp = Iv::tower(&f.s_plus);
        let sm = Iv::tower(&f.s_minus);
        let gap = sm.sub(&sp);
        OFrame { sp, sm, gap }
    }

    pub fn to_frame(&self, x: &Iv, y: &Iv) -> (Iv, Iv) {
        let w = y.sub(&self.sp.mul(x)).div(&self.gap).expect("slopes are separated");
        (x.sub(&w), w)
    }

    pub fn to_xy(&self, u: &Iv, w: &Iv) -> (Iv, Iv) {
        (u.add(w), u.mul(&self.sp).add(&w.mul(&self.sm)))
    }
}

/// `lo < x < hi`; values too close to call (including equality) are undecided,
/// so open and closed faces need no distinction.
fn decide(x: &Iv, lo: &Iv, hi: &Iv) -> Option<bool> {
    match (lo.lt(x), x.lt(hi)) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn pt(p: &Pt<TowerExt>) -> (Iv, Iv) {
    (Iv::tower(&p.0), Iv::tower(&p.1))
}

/// Lattice vectors to scan so that `q + k` covers the floating bounding box `[lo, hi]`, with margin.
fn scan_range(q: (f64, f64), bb: ((f64, f64), (f64, f64))) -> Vec<(i64, i64)> {
    let (x0, x1) = ((bb.0 .0 - q.0).floor() as i64 - 1, (bb.1 .0 - q.0).ceil() as i64 + 1);
    let (y0, y1) = ((bb.0 .1 - q.1).floor() as i64 - 1, (bb.1 .1 - q.1).ceil() as i64 + 1);
    let mut out = vec![];
    for a in x0..=x1 {
        for b in y0..=y1 {
            out.push((a, b));
        }
    }
    out
}

fn bbox(pts: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    (lo, hi)
}

fn pgram_bbox(p: &EigenParallelogram<TowerExt>) -> ((f64, f64), (f64, f64)) {
    let v: Vec<(f64, f64)> = p.vertices().iter().map(|v| (Iv::tower(&v.0).to_f64(), Iv::tower(&v.1).to_f64())).collect();
    bbox(&v)
}

/// Torus membership of `q` in the parallelogram, when every lift test is decided.
pub fn contains(q: &Pt<TowerExt>, p: &EigenParallelogram<TowerExt>) -> Option<bool> {
    let f = OFrame::of(&p.frame);
    let (qx, qy) = pt(q);
    let (ax, ay) = pt(&p.anchor);
    let (bounds_u, bounds_w) = ((Iv::tower(&p.u.0), Iv::tower(&p.u.1)), (Iv::tower(&p.w.0), Iv::tower(&p.w.1)));
    let mut undecided = false;
    for k in scan_range((qx.to_f64(), qy.to_f64()), pgram_bbox(p)) {
        let (u, w) = f.to_frame(&qx.add(&Iv::int(k.0)).sub(&ax), &qy.add(&Iv::int(k.1)).sub(&ay));
        let a = decide(&u, &bounds_u.0, &bounds_u.1);
        let b = decide(&w, &bounds_w.0, &bounds_w.1);
        match (a, b) {
            (Some(true), Some(true)) => return Some(true),
            (Some(false), _) | (_, Some(false)) => {}
            _ => undecided = true,
        }
    }
    (!undecided).then_some(false)
}

/// A lift `k` on which the segment meets the parallelogram in a proper interval,
/// with enclosures of both parameter endpoints.
#[derive(Debug)]
pub struct Hit {
    pub k: (i64, i64),
    pub lo: Iv,
    pub hi: Iv,
}

/// Lifts where the segment meets the parallelogram, when every lift is decided.
/// Degenerate (single-point) contacts count as undecided.
pub fn segment_hits(s: &EigenSegment<TowerExt>, p: &EigenParallelogram<TowerExt>) -> Option<Vec<Hit>> {
    let f = OFrame::of(&p.frame);
    let sf = OFrame::of(&s.frame);
    let (ax, ay) = pt(&s.anchor);
    let (px, py) = pt(&p.anchor);
    let (t0, t1) = (Iv::tower(&s.t.0), Iv::tower(&s.t.1));
    let one = Iv::int(1);
    let zero = Iv::int(0);
    let (dx, dy) = match s.axis {
        Axis::Plus => sf.to_xy(&one, &zero),
        Axis::Minus => sf.to_xy(&zero, &one),
    };
    // same frame: the frame coordinates of the direction are exact unit vectors
    let (du, dw) = if s.frame == p.frame {
        match s.axis {
            Axis::Plus => (one.clone(), zero.clone()),
            Axis::Minus => (zero.clone(), one.clone()),
        }
    } else {
        f.to_frame(&dx, &dy)
    };
    let ends = [(ax.add(&dx.mul(&t0)), ay.add(&dy.mul(&t0))), (ax.add(&dx.mul(&t1)), ay.add(&dy.mul(&t1)))];
    let ends_f: Vec<(f64, f64)> = ends.iter().map(|(x, y)| (x.to_f64(), y.to_f64())).collect();
    let sb = bbox(&ends_f);
    let pb = pgram_bbox(p);
    // k ranges over translates moving some part of the segment's box onto the parallelogram's box
    let mut ks = vec![];
    for a in (pb.0 .0 - sb.1 .0).floor() as i64 - 1..=(pb.1 .0 - sb.0 .0).ceil() as i64 + 1 {
        for b in (pb.0 .1 - sb.1 .1).floor() as i64 - 1..=(pb.1 .1 - sb.0 .1).ceil() as i64 + 1 {
            ks.push((a, b));
        }
    }
    let bounds = [(Iv::tower(&p.u.0), Iv::tower(&p.u.1)), (Iv::tower(&p.w.0), Iv::tower(&p.w.1))];
    let mut out = vec![];
    for k in ks {
        let (cu, cw) = f.to_frame(&ax.add(&Iv::int(k.0)).sub(&px), &ay.add(&Iv::int(k.1)).sub(&py));
        let mut lo = t0.clone();
        let mut hi = t1.clone();
        let mut empty = false;
        for (c, d, (b0, b1)) in [(cu, du.clone(), bounds[0].clone()), (cw, dw.clone(), bounds[1].clone())] {
            match d.sign() {
                Some(0) => match decide(&c, &b0, &b1) {
                    Some(true) => {}
                    Some(false) => empty = true,
                    None => return None,
                },
                Some(sg) => {
                    let a = b0.sub(&c).div(&d).unwrap();
                    let b = b1.sub(&c).div(&d).unwrap();
                    let (l, h) = if sg > 0 { (a, b) } else { (b, a) };
                    lo = lo.max(&l);
                    hi = hi.min(&h);
                }
                None => return None,
            }
        }
        if empty {
            continue;
        }
        match lo.lt(&hi) {
            Some(true) => out.push(Hit { k, lo, hi }),
            Some(false) => {}
            None => return None,
        }
    }
    Some(out)
}

#[derive(Debug, Default)]
pub struct Agreement {
    pub instances: usize,
    pub conclusive: usize,
    pub disagreements: Vec<String>,
}

/// Random membership and segment instances checked against the oracle.
pub fn agreement(seed: u64, n: usize) -> Agreement {
    use rand::SeedableRng;
    use toral_core::torusgeom::segment_pgram_intersect;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Agreement::default();
    for i in 0..n {
        let p = super::instances::pgram(&mut rng);
        out.instances += 1;
        if i % 2 == 0 {
            let x = super::instances::point(&mut rng, &p);
            if let Some(want) = contains(&x, &p) {
                out.conclusive += 1;
                if p.contains(&x) != want {
                    out.disagreements.push(format!("membership #{i}: oracle {want}"));
                }
            }
        } else {
            let s = super::instances::segment(&mut rng, &p);
            if let Some(want) = segment_hits(&s, &p) {
                out.conclusive += 1;
                let got = segment_pgram_intersect(&s, &p);
                let ok = got.len() == want.len()
                    && want.iter().all(|h| {
                        got.iter().any(|g| g.k == h.k && h.lo.contains(&Iv::tower(&g.lo)) && h.hi.contains(&Iv::tower(&g.hi)))
                    });
                if !ok {
                    out.disagreements.push(format!("segment #{i}: oracle {} lifts, exact {}", want.len(), got.len()));
                }
            }
        }
    }
    out
}
