//! The tubes `T^{-n}(B)`, proper overlaps and the slice lemmas at finite depth.
//!
//! With positive eigenvalues and `det = 1`, `T^{-n}` scales frame coordinates by
//! `(λ₊^{-n}, λ₊^{n})` and fixes the origin, so every tube is the origin-anchored
//! box `(0, u*λ₊^{-n})×(0, cλ₊^{n})` in the same frame.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphism::{apply_matrix, mat_pow, ToralAuto};
use crate::boxconstruct::BoxB;
use crate::error::Error;
use crate::numbers::{rat, Scalar, TowerExt};
use crate::torusgeom::{psub, slice_through, torus_eq, EigenFrame, EigenParallelogram, EigenSegment, FaceFlags, Pt, Slice};

type K = TowerExt;

#[derive(Clone, Debug, PartialEq)]
pub struct Tube {
    pub depth: usize,
    pub pgram: EigenParallelogram<K>,
}

impl Tube {
    pub fn u_len(&self) -> K {
        self.pgram.u_len()
    }

    pub fn w_len(&self) -> K {
        self.pgram.w_len()
    }

    /// `𝔠_n`, on the contracting line through the origin.
    pub fn face_c(&self) -> EigenSegment<K> {
        self.pgram.closure().u_face(false)
    }

    pub fn face_c_prime(&self) -> EigenSegment<K> {
        self.pgram.closure().u_face(true)
    }

    pub fn face_e(&self) -> EigenSegment<K> {
        self.pgram.closure().w_face(false)
    }

    pub fn face_e_prime(&self) -> EigenSegment<K> {
        self.pgram.closure().w_face(true)
    }

    pub fn contains(&self, p: &Pt<K>) -> bool {
        self.pgram.contains(p)
    }
}

pub fn lambda_pow(t: &ToralAuto, n: usize) -> K {
    K::from_quad(&t.lambda_plus.pow(n as u32))
}

pub fn make_tube(bx: &BoxB, n: usize) -> Tube {
    let l = lambda_pow(&bx.t, n);
    let inv = l.checked_recip().expect("λ₊ ≠ 0");
    let pgram = EigenParallelogram::new(
        bx.frame(),
        (K::zero(), K::zero()),
        (K::zero(), bx.u_star.clone() * inv),
        (K::zero(), bx.c.clone() * l),
        FaceFlags::OPEN,
    )
    .expect("tube extents are positive");
    Tube { depth: n, pgram }
}

pub fn make_tubes(bx: &BoxB, max_depth: usize) -> Vec<Tube> {
    (0..=max_depth).map(|n| make_tube(bx, n)).collect()
}

/// True iff distinct lifts of the open parallelogram are pairwise disjoint.
pub fn pgram_is_embedded(p: &EigenParallelogram<K>) -> bool {
    let (ul, wl) = (p.u_len(), p.w_len());
    p.frame
        .lattice_in_box(&-ul.clone(), &ul, &-wl.clone(), &wl)
        .into_iter()
        .filter(|h| h.k != (0, 0))
        .all(|h| !(h.u.abs_val().lt(&ul) && h.w.abs_val().lt(&wl)))
}

pub fn self_intersection_check(tube: &Tube) -> bool {
    pgram_is_embedded(&tube.pgram)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `x_m ∈ S_n`
    Unprimed,
    /// `x′_m ∈ S_n`
    Primed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapVerdict {
    NotIntersecting,
    Improper,
    Proper(Side),
}

/// Slices of both tubes through `y` and the verdict of the proper-overlap test.
pub fn proper_overlap(old: &Tube, new: &Tube, y: &Pt<K>) -> Result<OverlapVerdict, Error> {
    if old.depth == new.depth {
        return Err(Error::SameDepth);
    }
    if old.depth > new.depth {
        return Err(Error::InvalidInput("the old tube must have the smaller depth".into()));
    }
    let (Ok(sm), Ok(sn)) = (slice_through(y, &old.pgram), slice_through(y, &new.pgram)) else {
        return Ok(OverlapVerdict::NotIntersecting);
    };
    Ok(verdict_from_slices(&sm, &sn))
}

/// Both slices share the lift of `y`, so positions along `v₊` are `−at.u` offsets.
fn verdict_from_slices(sm: &Slice<K>, sn: &Slice<K>) -> OverlapVerdict {
    // S_n = (−a_n, u_n − a_n) relative to y; x_m at −a_m, x′_m at u_m − a_m
    let (am, an) = (&sm.at.0, &sn.at.0);
    let lo = -an.clone();
    let hi = sn.length() - an.clone();
    let inside = |t: K| lo.lt(&t) && t.lt(&hi);
    if inside(-am.clone()) {
        OverlapVerdict::Proper(Side::Unprimed)
    } else if inside(sm.length() - am.clone()) {
        OverlapVerdict::Proper(Side::Primed)
    } else {
        OverlapVerdict::Improper
    }
}

/// A connected component of `tube_m ∩ tube_n`: the origin lift of the old tube
/// against the new tube's lift at `k`, as a frame rectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub m: usize,
    pub n: usize,
    pub k: (i64, i64),
    pub u: (K, K),
    pub w: (K, K),
}

impl Region {
    pub fn point(&self, frame: &EigenFrame<K>, fu: &K, fw: &K) -> Pt<K> {
        let u = self.u.0.clone() + (self.u.1.clone() - self.u.0.clone()) * fu.clone();
        let w = self.w.0.clone() + (self.w.1.clone() - self.w.0.clone()) * fw.clone();
        frame.from_frame(&u, &w)
    }
}

pub fn intersection_regions(old: &Tube, new: &Tube) -> Vec<Region> {
    let f = &old.pgram.frame;
    let (um, wm, un, wn) = (old.u_len(), old.w_len(), new.u_len(), new.w_len());
    f.lattice_in_box(&-un.clone(), &um, &-wn.clone(), &wm)
        .into_iter()
        .filter(|h| (-un.clone()).lt(&h.u) && h.u.lt(&um) && (-wn.clone()).lt(&h.w) && h.w.lt(&wm))
        .map(|h| Region {
            m: old.depth,
            n: new.depth,
            k: h.k,
            u: (K::max_of(K::zero(), h.u.clone()), K::min_of(um.clone(), h.u.clone() + un.clone())),
            w: (K::max_of(K::zero(), h.w.clone()), K::min_of(wm.clone(), h.w.clone() + wn.clone())),
        })
        .collect()
}

/// Verdict read off the rectangle: the new slice spans `(k_u, k_u + u_n)` in the old frame.
pub fn region_verdict(old: &Tube, new: &Tube, r: &Region) -> OverlapVerdict {
    let (ku, _) = old.pgram.frame.lattice_frame(r.k);
    let hi = ku.clone() + new.u_len();
    let inside = |t: &K| ku.lt(t) && t.lt(&hi);
    if inside(&K::zero()) {
        OverlapVerdict::Proper(Side::Unprimed)
    } else if inside(&old.u_len()) {
        OverlapVerdict::Proper(Side::Primed)
    } else {
        OverlapVerdict::Improper
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub m: usize,
    pub n: usize,
    pub k: (i64, i64),
    pub verdict: OverlapVerdict,
    /// Every sampled point of the region gave `verdict`.
    pub samples_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub m: usize,
    pub n: usize,
    pub regions: usize,
    pub proper: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub max_depth: usize,
    pub self_intersection_clean: Vec<bool>,
    pub pairs: Vec<PairReport>,
    pub regions: Vec<RegionReport>,
    pub total_regions: usize,
    pub proper_count: usize,
    pub pass: bool,
}

/// Centroid and the midpoints between the centroid and each corner.
fn sample_fractions() -> Vec<(K, K)> {
    let q = |a, b| K::from_rational(rat(a, b));
    vec![(q(1, 2), q(1, 2)), (q(1, 4), q(1, 4)), (q(3, 4), q(1, 4)), (q(3, 4), q(3, 4)), (q(1, 4), q(3, 4))]
}

pub fn scan_no_proper_overlap(bx: &BoxB, max_depth: usize) -> OverlapReport {
    let tubes = make_tubes(bx, max_depth);
    let frame = bx.frame();
    let fr = sample_fractions();
    let mut pairs = vec![];
    let mut regions = vec![];
    for n in 1..=max_depth {
        for m in 0..n {
            let (old, new) = (&tubes[m], &tubes[n]);
            let rs = intersection_regions(old, new);
            let mut proper = 0;
            for r in &rs {
                let verdict = region_verdict(old, new, r);
                let samples_agree = fr.iter().all(|(a, b)| {
                    let y = r.point(&frame, a, b);
                    proper_overlap(old, new, &y).map(|v| v == verdict).unwrap_or(false)
                });
                if matches!(verdict, OverlapVerdict::Proper(_)) {
                    proper += 1;
                }
                regions.push(RegionReport { m, n, k: r.k, verdict, samples_agree });
            }
            pairs.push(PairReport { m, n, regions: rs.len(), proper });
        }
    }
    let proper_count = pairs.iter().map(|p| p.proper).sum();
    let pass = proper_count == 0 && regions.iter().all(|r| r.samples_agree);
    OverlapReport {
        max_depth,
        self_intersection_clean: tubes.iter().map(self_intersection_check).collect(),
        total_regions: regions.len(),
        pairs,
        regions,
        proper_count,
        pass,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceLemmaReport {
    pub max_depth: usize,
    /// `|S_n| = λ₊^{-n}·|𝔈|` for every depth.
    pub lengths_exact: bool,
    /// `T^j` maps slice endpoints to slice endpoints.
    pub image_checks: usize,
    pub image_failures: usize,
    /// Sampled intersecting pairs where both new endpoints lie in the closed old slice.
    pub containment_checks: usize,
    pub containment_failures: usize,
    /// `|S_n| < |S_m|` and the exact ratio for the sampled pairs.
    pub shrink_failures: usize,
    pub pass: bool,
}

fn random_fraction(rng: &mut ChaCha8Rng) -> K {
    K::from_rational(rat(rng.gen_range(1..1000), 1000))
}

/// Offset of `p` from `a` along `v₊`, if `p − a` is an exact multiple of `v₊`.
fn offset_along_plus(frame: &EigenFrame<K>, a: &Pt<K>, p: &Pt<K>) -> Option<K> {
    let (u, w) = frame.to_frame(&psub(p, a));
    w.sign().is_zero().then_some(u)
}

pub fn check_slice_lemmas(bx: &BoxB, max_depth: usize, samples: usize, seed: u64) -> SliceLemmaReport {
    let t = &bx.t;
    let tubes = make_tubes(bx, max_depth);
    let frame = bx.frame();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let lengths_exact = tubes.iter().all(|tb| {
        tb.u_len() * lambda_pow(t, tb.depth) == bx.u_star
    });

    let (mut image_checks, mut image_failures) = (0, 0);
    for m in 0..=max_depth {
        let (fu, fw) = (random_fraction(&mut rng), random_fraction(&mut rng));
        let z = tubes[m].pgram.point_at(&(tubes[m].u_len() * fu), &(tubes[m].w_len() * fw));
        let Ok(sm) = slice_through(&z, &tubes[m].pgram) else {
            image_failures += 1;
            continue;
        };
        for j in 0..=m {
            image_checks += 1;
            let mj = mat_pow(&t.matrix, j as u32);
            let (tz, tx, txp) = (apply_matrix(&mj, &z), apply_matrix(&mj, &sm.x), apply_matrix(&mj, &sm.x_prime));
            let ok = match slice_through(&tz, &tubes[m - j].pgram) {
                Ok(s) => torus_eq(&s.x, &tx) && torus_eq(&s.x_prime, &txp),
                Err(_) => false,
            };
            if !ok {
                image_failures += 1;
            }
        }
    }

    // intersecting pairs sampled from the exact region lists
    let mut all_regions = vec![];
    for n in 1..=max_depth {
        for m in 0..n {
            all_regions.extend(intersection_regions(&tubes[m], &tubes[n]));
        }
    }
    let (mut containment_checks, mut containment_failures, mut shrink_failures) = (0, 0, 0);
    if !all_regions.is_empty() {
        for _ in 0..samples {
            let r = &all_regions[rng.gen_range(0..all_regions.len())];
            let y = r.point(&frame, &random_fraction(&mut rng), &random_fraction(&mut rng));
            let (Ok(sm), Ok(sn)) = (slice_through(&y, &tubes[r.m].pgram), slice_through(&y, &tubes[r.n].pgram)) else {
                containment_failures += 1;
                continue;
            };
            containment_checks += 1;
            let lm = sm.length();
            let in_closed = |p: &Pt<K>| {
                offset_along_plus(&frame, &sm.x, p).is_some_and(|o| !o.is_neg() && o.le(&lm))
            };
            let both = in_closed(&sn.x) && in_closed(&sn.x_prime);
            let improper = verdict_from_slices(&sm, &sn) == OverlapVerdict::Improper;
            // an improper overlap leaves the new slice inside the closed old one
            if improper != both {
                containment_failures += 1;
            }
            let ratio_ok = sn.length() * lambda_pow(t, r.n - r.m) == lm;
            if !(sn.length().lt(&lm) && ratio_ok) {
                shrink_failures += 1;
            }
        }
    }
    let pass = lengths_exact && image_failures == 0 && containment_failures == 0 && shrink_failures == 0;
    SliceLemmaReport {
        max_depth,
        lengths_exact,
        image_checks,
        image_failures,
        containment_checks,
        containment_failures,
        shrink_failures,
        pass,
    }
}
