//! Construction of the open box `B` from a small eigen-box `B′` at the origin
//! and the orbit of a rational point.
//!
//! Everything is done in the frame `(u, w)` of `T` anchored at the origin:
//! `B′ = (0, u_max)×(0, w_max)`, `B′⁺` is `[0, u_max]×{0}` and the contracting
//! segment `P(α, y)` through a lift with frame coordinates `(U, W)` is
//! `{U}×[W − α, W + α]`. So `P(α, y_n)` meets `B′⁺` iff some lift has
//! `U ∈ [0, u_max]` and `|W| ≤ α`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::automorphism::{orbit_and_period, Mat2, RationalPoint, ToralAuto};
use crate::error::Error;
use crate::numbers::{serde_rational, Rational, Scalar, TowerExt};
use crate::torusgeom::{EigenFrame, EigenParallelogram, EigenSegment, FaceFlags, Pt};

/// Largest `w`-window half-width tried before giving up on an `α_n` search.
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 16;

type K = TowerExt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxPrimeSpec {
    #[serde(with = "serde_rational")]
    pub u_max: Rational,
    #[serde(with = "serde_rational")]
    pub w_max: Rational,
    pub y0: RationalPoint,
}

impl BoxPrimeSpec {
    pub fn new(u_max: Rational, w_max: Rational, y0: RationalPoint) -> Result<Self, Error> {
        if !u_max.is_positive() || !w_max.is_positive() {
            return Err(Error::InvalidInput("B′ edges must be positive".into()));
        }
        if y0.is_origin() {
            return Err(Error::InvalidInput("y0 must not be the origin".into()));
        }
        Ok(BoxPrimeSpec { u_max, w_max, y0 })
    }

    pub fn pgram(&self, frame: &EigenFrame<K>) -> EigenParallelogram<K> {
        EigenParallelogram::new(
            frame.clone(),
            (K::zero(), K::zero()),
            (K::zero(), K::from_rational(self.u_max.clone())),
            (K::zero(), K::from_rational(self.w_max.clone())),
            FaceFlags::OPEN,
        )
        .expect("positive extents")
    }

    /// Whether some lift of `y0` lies in the open box `B′`.
    pub fn y0_inside(&self, frame: &EigenFrame<K>) -> bool {
        self.pgram(frame).contains(&self.y0.to_tower())
    }
}

/// A lift `y_n + k` with its frame coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitLift {
    pub n: usize,
    pub k: (i64, i64),
    pub u: K,
    pub w: K,
}

impl OrbitLift {
    fn of(frame: &EigenFrame<K>, n: usize, y: &RationalPoint, k: (i64, i64)) -> Self {
        let (yu, yw) = frame.to_frame(&y.to_tower());
        let (ku, kw) = frame.lattice_frame(k);
        OrbitLift { n, k, u: yu + ku, w: yw + kw }
    }
}

/// Least `α` for which `P(α, y_n)` meets `B′⁺`, with the lift realising it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaRecord {
    pub n: usize,
    pub alpha_n: K,
    pub k: (i64, i64),
    /// Expanding coordinate of the hit point on `B′⁺`.
    pub hit_u: K,
    /// Signed contracting coordinate of `y_n + k`; `alpha_n = |hit_w|`.
    pub hit_w: K,
}

impl AlphaRecord {
    pub fn hit_point(&self, frame: &EigenFrame<K>) -> Pt<K> {
        frame.from_frame(&self.hit_u, &K::zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// Unique minimal index, and its `P` meets `B′`.
    UniqueMeets,
    /// Unique minimal index, `P` only touches `B′⁺`; `α` perturbed upwards.
    UniquePerturbed,
    /// Several minimal indices, at least one `P` meets `B′`.
    TiedMeets,
    /// Several minimal indices, none meets `B′`; `α` perturbed upwards.
    TiedPerturbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparationKind {
    /// The lift carrying `B_x`; margin `W + α* − c ≥ 0`.
    Chosen,
    /// `U ≥ u*`, so the segment misses `B` sideways; margin `U − u* > 0`.
    OutsideU,
    /// Segment ends at or below `w = 0`; margin `−(W + α*) ≥ 0`.
    Below,
    /// Segment starts above `w = c`; margin `W − α* − c > 0`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub n: usize,
    pub k: (i64, i64),
    pub kind: SeparationKind,
    pub margin: K,
}

/// The open box `(0, u*)×(0, c)` in the frame of `T`, vertex at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxB {
    pub t: ToralAuto,
    pub u_star: K,
    pub c: K,
    pub case: CaseTag,
    pub tied: Vec<usize>,
    pub chosen_n: usize,
    pub chosen_k: (i64, i64),
    pub alpha_star: K,
    pub eta: Option<K>,
}

impl BoxB {
    pub fn frame(&self) -> EigenFrame<K> {
        EigenFrame::of(&self.t)
    }

    pub fn pgram(&self) -> EigenParallelogram<K> {
        EigenParallelogram::new(
            self.frame(),
            (K::zero(), K::zero()),
            (K::zero(), self.u_star.clone()),
            (K::zero(), self.c.clone()),
            FaceFlags::OPEN,
        )
        .expect("box extents are positive")
    }

    /// `𝔠 = B₀`, the contracting face through the origin.
    pub fn face_c(&self) -> EigenSegment<K> {
        self.pgram().closure().u_face(false)
    }

    /// `𝔠′ = B_x`.
    pub fn face_c_prime(&self) -> EigenSegment<K> {
        self.pgram().closure().u_face(true)
    }

    /// `𝔈`, the expanding face through the origin.
    pub fn face_e(&self) -> EigenSegment<K> {
        self.pgram().closure().w_face(false)
    }

    pub fn face_e_prime(&self) -> EigenSegment<K> {
        self.pgram().closure().w_face(true)
    }

    pub fn center(&self) -> Pt<K> {
        self.pgram().center()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionCertificate {
    pub matrix: Mat2,
    pub spec: BoxPrimeSpec,
    #[serde(with = "serde_rational")]
    pub bx_cap: Rational,
    /// Reported only; `y0` is not required to lie in `B′`.
    pub y0_in_bprime: bool,
    pub orbit: Vec<RationalPoint>,
    pub alphas: Vec<AlphaRecord>,
    pub alpha_min: K,
    pub case: CaseTag,
    pub tied: Vec<usize>,
    pub eta: Option<K>,
    pub alpha_star: K,
    pub chosen_n: usize,
    pub chosen_k: (i64, i64),
    pub u_star: K,
    pub c: K,
    /// Rational upper bound on `|v₋|`, used for the `B_x` length cap.
    #[serde(with = "serde_rational")]
    pub vminus_norm_upper: Rational,
    /// Half-width of the `w`-window the separations cover.
    pub window: K,
    pub separations: Vec<Separation>,
}

fn k(q: &Rational) -> K {
    K::from_rational(q.clone())
}

/// Lifts of `y` with `U ∈ [0, u_max]` and `|W| ≤ a`.
fn lifts_in_strip(frame: &EigenFrame<K>, n: usize, y: &RationalPoint, u_max: &K, a: &K) -> Vec<OrbitLift> {
    let (yu, yw) = frame.to_frame(&y.to_tower());
    frame
        .lattice_in_box(&-yu.clone(), &(u_max.clone() - yu.clone()), &(-a.clone() - yw.clone()), &(a.clone() - yw.clone()))
        .into_iter()
        .map(|h| OrbitLift { n, k: h.k, u: yu.clone() + h.u, w: yw.clone() + h.w })
        .collect()
}

/// Upper bound on `√q` with denominator `2^32`.
fn sqrt_upper(q: &Rational) -> Rational {
    let scaled = (q * Rational::from_integer(BigInt::one() << 64usize)).ceil().to_integer();
    let mut r = scaled.sqrt();
    if &r * &r < scaled {
        r += 1;
    }
    Rational::new(r, BigInt::one() << 32usize)
}

/// Rational upper bound on `|(1, s)|`.
pub fn direction_norm_upper(s: &K) -> Rational {
    let n2 = (K::one() + s.clone() * s.clone()).enclose(64).hi_rational();
    sqrt_upper(&n2)
}

pub fn vminus_norm_upper(t: &ToralAuto) -> Rational {
    direction_norm_upper(&K::from_quad(&t.slope_minus))
}

/// `α_n` by iterative deepening on the `w`-window, starting at `w_max`.
pub fn compute_alpha(n: usize, y: &RationalPoint, spec: &BoxPrimeSpec, t: &ToralAuto) -> Result<AlphaRecord, Error> {
    compute_alpha_capped(n, y, spec, t, DEFAULT_SEARCH_CAP)
}

pub fn compute_alpha_capped(
    n: usize,
    y: &RationalPoint,
    spec: &BoxPrimeSpec,
    t: &ToralAuto,
    search_cap: u64,
) -> Result<AlphaRecord, Error> {
    let frame = EigenFrame::<K>::of(t);
    let u_max = k(&spec.u_max);
    let mut a = spec.w_max.clone();
    loop {
        let lifts = lifts_in_strip(&frame, n, y, &u_max, &k(&a));
        if let Some(best) = lifts.into_iter().min_by(|p, q| p.w.abs_val().cmp_to(&q.w.abs_val())) {
            if best.w.sign().is_zero() {
                return Err(Error::InvariantViolated(format!("orbit point {n} lies on the expanding line through 0")));
            }
            return Ok(AlphaRecord { n, alpha_n: best.w.abs_val(), k: best.k, hit_u: best.u, hit_w: best.w });
        }
        if a > Rational::from_integer(BigInt::from(search_cap)) {
            return Err(Error::SearchBudgetExceeded(search_cap));
        }
        a *= Rational::from_integer(BigInt::from(2));
    }
}

pub fn build_box(spec: &BoxPrimeSpec, t: &ToralAuto, bx_cap: &Rational) -> Result<(BoxB, ConstructionCertificate), Error> {
    build_box_capped(spec, t, bx_cap, DEFAULT_SEARCH_CAP)
}

pub fn build_box_capped(
    spec: &BoxPrimeSpec,
    t: &ToralAuto,
    bx_cap: &Rational,
    search_cap: u64,
) -> Result<(BoxB, ConstructionCertificate), Error> {
    if !t.has_positive_eigenvalues() {
        return Err(Error::InvalidInput("box construction needs positive eigenvalues; positivize first".into()));
    }
    if !bx_cap.is_positive() {
        return Err(Error::InvalidInput("bx cap must be positive".into()));
    }
    let frame = EigenFrame::<K>::of(t);
    let orbit = orbit_and_period(&spec.y0, t);
    if orbit.iter().any(RationalPoint::is_origin) {
        return Err(Error::DegenerateOrbit);
    }
    let alphas = orbit
        .iter()
        .enumerate()
        .map(|(n, y)| compute_alpha_capped(n, y, spec, t, search_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let alpha_min = alphas.iter().map(|r| r.alpha_n.clone()).reduce(K::min_of).expect("nonempty orbit");

    let u_max = k(&spec.u_max);
    let w_max = k(&spec.w_max);
    // Wide enough for α_next (capped at w_max) and for every separation entry.
    let window = alpha_min.clone() + w_max.clone() + w_max.clone();
    let mut lifts: Vec<OrbitLift> =
        orbit.iter().enumerate().flat_map(|(n, y)| lifts_in_strip(&frame, n, y, &u_max, &window)).collect();
    lifts.sort_by(|a, b| a.u.cmp_to(&b.u));
    for pair in lifts.windows(2) {
        if pair[0].u == pair[1].u {
            return Err(Error::InvariantViolated("two orbit lifts share a hit point on B′⁺".into()));
        }
    }

    let tied_lifts: Vec<&OrbitLift> = lifts.iter().filter(|l| l.w.abs_val() == alpha_min).collect();
    let tied: Vec<usize> = tied_lifts.iter().map(|l| l.n).collect::<BTreeSet<_>>().into_iter().collect();
    let zero = K::zero();
    let interior = |l: &OrbitLift| zero.lt(&l.u) && l.u.lt(&u_max);
    let meeting: Vec<&OrbitLift> = tied_lifts.iter().copied().filter(|l| l.w.is_pos() && interior(l)).collect();

    let (case, alpha_star, eta, chosen) = if let Some(first) = meeting.first() {
        // lifts are sorted by U, so this is the S_i holding no other hit point
        let case = if tied.len() == 1 { CaseTag::UniqueMeets } else { CaseTag::TiedMeets };
        (case, alpha_min.clone(), None, (*first).clone())
    } else {
        let alpha_next = lifts.iter().map(|l| l.w.abs_val()).filter(|a| alpha_min.lt(a)).reduce(K::min_of);
        let gap = match alpha_next {
            Some(a) => K::min_of(a - alpha_min.clone(), w_max.clone()),
            None => w_max.clone(),
        };
        let eta = gap.half();
        let chosen = tied_lifts.iter().copied().find(|l| interior(l)).ok_or(Error::PerturbationFailed)?;
        let case = if tied.len() == 1 { CaseTag::UniquePerturbed } else { CaseTag::TiedPerturbed };
        (case, alpha_min.clone() + eta.clone(), Some(eta), chosen.clone())
    };
    let u_star = chosen.u.clone();

    // δ: clearance above α* of segments that sit over (0, u*).
    let delta = lifts
        .iter()
        .filter(|l| zero.lt(&l.u) && l.u.lt(&u_star) && alpha_star.lt(&l.w))
        .map(|l| l.w.clone() - alpha_star.clone())
        .reduce(K::min_of)
        .unwrap_or_else(|| w_max.clone());
    let vnorm = vminus_norm_upper(t);
    let cap_w = k(&(bx_cap / &vnorm));
    let top = chosen.w.clone() + alpha_star.clone();
    let c = [delta.half(), top, cap_w, w_max.clone()].into_iter().reduce(K::min_of).unwrap();
    if !c.is_pos() {
        return Err(Error::InvariantViolated("box height is not positive".into()));
    }

    let sep_window = alpha_star.clone() + w_max.clone();
    let mut separations = vec![];
    for l in lifts.iter().filter(|l| l.w.abs_val().le(&sep_window)) {
        let (kind, margin) = classify(l, &chosen, &u_star, &alpha_star, &c);
        let ok = match kind {
            SeparationKind::Chosen | SeparationKind::Below => !margin.is_neg(),
            SeparationKind::OutsideU | SeparationKind::Above => margin.is_pos(),
        };
        if !ok {
            return Err(Error::InvariantViolated(format!("orbit lift n={} k={:?} meets B", l.n, l.k)));
        }
        separations.push(Separation { n: l.n, k: l.k, kind, margin });
    }

    let bx = BoxB {
        t: t.clone(),
        u_star: u_star.clone(),
        c: c.clone(),
        case,
        tied: tied.clone(),
        chosen_n: chosen.n,
        chosen_k: chosen.k,
        alpha_star: alpha_star.clone(),
        eta: eta.clone(),
    };
    let cert = ConstructionCertificate {
        matrix: t.matrix,
        spec: spec.clone(),
        bx_cap: bx_cap.clone(),
        y0_in_bprime: spec.y0_inside(&frame),
        orbit,
        alphas,
        alpha_min,
        case,
        tied,
        eta,
        alpha_star,
        chosen_n: chosen.n,
        chosen_k: chosen.k,
        u_star,
        c,
        vminus_norm_upper: vnorm,
        window: sep_window,
        separations,
    };
    Ok((bx, cert))
}

fn classify(l: &OrbitLift, chosen: &OrbitLift, u_star: &K, alpha_star: &K, c: &K) -> (SeparationKind, K) {
    if l.n == chosen.n && l.k == chosen.k {
        (SeparationKind::Chosen, l.w.clone() + alpha_star.clone() - c.clone())
    } else if u_star.le(&l.u) {
        (SeparationKind::OutsideU, l.u.clone() - u_star.clone())
    } else if !(l.w.clone() + alpha_star.clone()).is_pos() {
        (SeparationKind::Below, -(l.w.clone() + alpha_star.clone()))
    } else {
        (SeparationKind::Above, l.w.clone() - alpha_star.clone() - c.clone())
    }
}

/// Replays a certificate; `Err` names the first failing check.
pub fn check_certificate(cert: &ConstructionCertificate) -> Result<(), String> {
    let t = ToralAuto::analyze(cert.matrix).map_err(|e| e.to_string())?;
    if !t.has_positive_eigenvalues() {
        return Err("map does not have positive eigenvalues".into());
    }
    let frame = EigenFrame::<K>::of(&t);
    let spec = &cert.spec;
    let (u_max, w_max) = (k(&spec.u_max), k(&spec.w_max));
    let zero = K::zero();
    let orbit = orbit_and_period(&spec.y0, &t);
    if orbit != cert.orbit {
        return Err("orbit does not match".into());
    }
    if orbit.iter().any(RationalPoint::is_origin) {
        return Err("orbit contains the origin".into());
    }
    if spec.y0_inside(&frame) != cert.y0_in_bprime {
        return Err("y0 membership flag is wrong".into());
    }
    if cert.alphas.len() != orbit.len() {
        return Err("one alpha record per orbit point expected".into());
    }
    for (n, (rec, y)) in cert.alphas.iter().zip(&orbit).enumerate() {
        let l = OrbitLift::of(&frame, n, y, rec.k);
        if rec.n != n || l.u != rec.hit_u || l.w != rec.hit_w {
            return Err(format!("alpha record {n} does not match its lift"));
        }
        if l.u.is_neg() || u_max.lt(&l.u) || rec.alpha_n != l.w.abs_val() || !rec.alpha_n.is_pos() {
            return Err(format!("alpha record {n} is not a hit on B′⁺"));
        }
        let closer = lifts_in_strip(&frame, n, y, &u_max, &rec.alpha_n).into_iter().any(|m| m.w.abs_val().lt(&rec.alpha_n));
        if closer {
            return Err(format!("alpha record {n} is not minimal"));
        }
    }
    let alpha_min = cert.alphas.iter().map(|r| r.alpha_n.clone()).reduce(K::min_of).unwrap();
    if alpha_min != cert.alpha_min {
        return Err("alpha_min is not the minimum".into());
    }
    let tied: Vec<usize> = cert.alphas.iter().filter(|r| r.alpha_n == alpha_min).map(|r| r.n).collect();
    if tied != cert.tied {
        return Err("tied index set is wrong".into());
    }
    let chosen_y = orbit.get(cert.chosen_n).ok_or("chosen index out of range")?;
    let chosen = OrbitLift::of(&frame, cert.chosen_n, chosen_y, cert.chosen_k);
    if chosen.u != cert.u_star || chosen.w.abs_val() != alpha_min {
        return Err("chosen lift is not a minimal hit at u*".into());
    }
    if !(zero.lt(&chosen.u) && chosen.u.lt(&u_max)) {
        return Err("chosen hit point is not interior to B′⁺".into());
    }
    let perturbed = matches!(cert.case, CaseTag::UniquePerturbed | CaseTag::TiedPerturbed);
    let unique = matches!(cert.case, CaseTag::UniqueMeets | CaseTag::UniquePerturbed);
    if unique != (tied.len() == 1) {
        return Err("case tag disagrees with the tied set".into());
    }
    match (&cert.eta, perturbed) {
        (None, false) => {
            if cert.alpha_star != alpha_min || !chosen.w.is_pos() {
                return Err("unperturbed case needs α* = α_min and a lift meeting B′".into());
            }
        }
        (Some(eta), true) => {
            if !eta.is_pos() || w_max.half().lt(eta) || cert.alpha_star != alpha_min.clone() + eta.clone() {
                return Err("perturbation η out of range".into());
            }
        }
        _ => return Err("η present iff the case is perturbed".into()),
    }
    let c = &cert.c;
    if !c.is_pos() || w_max.lt(c) {
        return Err("box height out of range".into());
    }
    if k(&(cert.vminus_norm_upper.clone() * cert.vminus_norm_upper.clone())).lt(&(K::one() + frame.s_minus.clone() * frame.s_minus.clone()))
    {
        return Err("|v₋| bound is not an upper bound".into());
    }
    if k(&cert.bx_cap).lt(&(c.clone() * k(&cert.vminus_norm_upper))) {
        return Err("B_x exceeds the length cap".into());
    }
    if cert.window != cert.alpha_star.clone() + w_max.clone() {
        return Err("separation window is wrong".into());
    }

    let mut seen = BTreeSet::new();
    for (n, y) in orbit.iter().enumerate() {
        for l in lifts_in_strip(&frame, n, y, &u_max, &cert.window) {
            // no other P may reach B′⁺ strictly between α_min and α*
            let a = l.w.abs_val();
            if alpha_min.lt(&a) && a.le(&cert.alpha_star) {
                return Err(format!("lift n={n} k={:?} reaches B′⁺ below α*", l.k));
            }
            seen.insert((n, l.k));
            let Some(s) = cert.separations.iter().find(|s| s.n == n && s.k == l.k) else {
                return Err(format!("lift n={n} k={:?} has no separation entry", l.k));
            };
            let (kind, margin) = classify(&l, &chosen, &cert.u_star, &cert.alpha_star, c);
            if kind != s.kind || margin != s.margin {
                return Err(format!("separation n={n} k={:?} does not replay", l.k));
            }
            let ok = match kind {
                SeparationKind::Chosen => !margin.is_neg() && (l.w.clone() - cert.alpha_star.clone()).le(&zero),
                SeparationKind::Below => !margin.is_neg(),
                SeparationKind::OutsideU | SeparationKind::Above => margin.is_pos(),
            };
            if !ok {
                return Err(format!("separation n={n} k={:?} fails", l.k));
            }
        }
    }
    if seen.len() != cert.separations.len() {
        return Err("certificate lists lifts outside the window".into());
    }
    if !seen.contains(&(cert.chosen_n, cert.chosen_k)) {
        return Err("chosen lift missing from separations".into());
    }
    Ok(())
}

pub fn verify_certificate(cert: &ConstructionCertificate) -> bool {
    check_certificate(cert).is_ok()
}

/// Smallest-denominator rational point with a lift strictly inside `B′`.
pub fn default_y0(u_max: &Rational, w_max: &Rational, t: &ToralAuto, max_den: u64) -> Result<RationalPoint, Error> {
    let frame = EigenFrame::<K>::of(t);
    let probe = BoxPrimeSpec { u_max: u_max.clone(), w_max: w_max.clone(), y0: RationalPoint::origin() };
    let bprime = probe.pgram(&frame);
    for q in 2..=max_den {
        for a in 0..q {
            for b in 0..q {
                if a.gcd(&b).gcd(&q) != 1 {
                    continue;
                }
                let p = RationalPoint::new(Rational::new(a.into(), q.into()), Rational::new(b.into(), q.into()));
                if bprime.contains(&p.to_tower()) {
                    return Ok(p);
                }
            }
        }
    }
    Err(Error::SearchBudgetExceeded(max_den))
}
