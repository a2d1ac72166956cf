//! The truncated fractal `F_N`: points that avoid the tubes of depth `0..=N`,
//! and the search for a contracting segment inside it.
//!
//! All window arithmetic is in the frame of `T` on a fixed lift of the center.
//! A tube lift at `k` is `(k_u, k_u + u_n)×(k_w, k_w + w_n)`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boxconstruct::{direction_norm_upper, BoxB};
use crate::error::Error;
use crate::numbers::{Rational, Scalar, TowerExt};
use crate::torusgeom::{segment_pgram_intersect, Axis, EigenFrame, EigenSegment, Pt};
use crate::tubeverify::{make_tubes, Tube};

type K = TowerExt;

pub const DEFAULT_DEPTH: usize = 10;

pub struct FractalView {
    pub bx: BoxB,
    pub depth: usize,
    pub tubes: Vec<Tube>,
    frame: EigenFrame<K>,
}

impl FractalView {
    pub fn new(bx: BoxB, depth: usize) -> Self {
        let tubes = make_tubes(&bx, depth);
        let frame = bx.frame();
        FractalView { bx, depth, tubes, frame }
    }

    pub fn frame(&self) -> &EigenFrame<K> {
        &self.frame
    }

    /// `(x ∈ F_N, least n with x in tube n)`.
    pub fn membership(&self, x: &Pt<K>) -> (bool, Option<usize>) {
        match self.tubes.iter().position(|t| t.contains(x)) {
            Some(n) => (false, Some(n)),
            None => (true, None),
        }
    }
}

/// Open window `(u.0, u.1)×(w.0, w.1)` in absolute frame coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub u: (K, K),
    pub w: (K, K),
    /// Contracting coordinate of the slice `S_U` through the reference point.
    pub h: K,
}

impl SearchWindow {
    pub fn u_len(&self) -> K {
        self.u.1.clone() - self.u.0.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    /// `𝔠_M`
    C,
    /// `𝔠′_M`
    CPrime,
}

/// How a tube lift meets a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LiftClass {
    /// A contracting face lies strictly inside the window's `u`-range.
    Face { face: Face, k: (i64, i64), u: K, w: (K, K) },
    /// Spans the window in `u` and lies on or above `h` (meets through `𝔈`).
    Above { k: (i64, i64), bottom: K },
    /// Spans the window in `u` and lies on or below `h` (meets through `𝔈′`).
    Below { k: (i64, i64), top: K },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    /// Window met only through `𝔈_n`.
    Case2A,
    /// Window met only through `𝔈′_n`.
    Case2B,
    /// Both; the window was shrunk in the contracting direction.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub depth: usize,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoundSegment {
    /// Along `v₋` of `T`, open at both ends.
    pub segment: EigenSegment<K>,
    /// Disjoint from tubes `0..=certified_depth`.
    pub certified_depth: usize,
    pub tube: usize,
    pub face: Face,
    pub steps: Vec<Step>,
}

/// Classification of tube `n`'s lifts meeting the window; `None` if none do.
pub fn classify_tube(tube: &Tube, win: &SearchWindow) -> Result<Option<Vec<LiftClass>>, Error> {
    let f = &tube.pgram.frame;
    let (un, wn) = (tube.u_len(), tube.w_len());
    let ku_lo = win.u.0.clone() - un.clone();
    let kw_lo = win.w.0.clone() - wn.clone();
    let mut out = vec![];
    for hit in f.lattice_in_box(&ku_lo, &win.u.1, &kw_lo, &win.w.1) {
        let (ku, kw) = (hit.u, hit.w);
        if !(ku_lo.lt(&ku) && ku.lt(&win.u.1) && kw_lo.lt(&kw) && kw.lt(&win.w.1)) {
            continue;
        }
        let top = kw.clone() + wn.clone();
        let wr = (K::max_of(kw.clone(), win.w.0.clone()), K::min_of(top.clone(), win.w.1.clone()));
        let inside = |x: &K| win.u.0.lt(x) && x.lt(&win.u.1);
        let ku_hi = ku.clone() + un.clone();
        if inside(&ku) {
            out.push(LiftClass::Face { face: Face::C, k: hit.k, u: ku, w: wr });
        } else if inside(&ku_hi) {
            out.push(LiftClass::Face { face: Face::CPrime, k: hit.k, u: ku_hi, w: wr });
        } else if win.h.le(&kw) {
            out.push(LiftClass::Above { k: hit.k, bottom: kw });
        } else if top.le(&win.h) {
            out.push(LiftClass::Below { k: hit.k, top });
        } else {
            return Err(Error::InvariantViolated(format!("tube {} covers the reference slice", tube.depth)));
        }
    }
    Ok((!out.is_empty()).then_some(out))
}

/// Least depth `≥ from` whose tube meets the window.
pub fn first_meeting_tube(view: &FractalView, win: &SearchWindow, from: usize) -> Result<(usize, Vec<LiftClass>), Error> {
    for n in from..=view.depth {
        if let Some(c) = classify_tube(&view.tubes[n], win)? {
            return Ok((n, c));
        }
    }
    Err(Error::NoTubeMeetsWindow(view.depth))
}

/// Eigen-aligned window inscribed in the ball of radius `r` about the lift `c`.
pub fn inscribed_window(view: &FractalView, c: &Pt<K>, r: &Rational) -> SearchWindow {
    let f = view.frame();
    let two = Rational::from_integer(2.into());
    let a = K::from_rational(r / (direction_norm_upper(&f.s_plus) * &two));
    let b = K::min_of(
        K::from_rational(r / (direction_norm_upper(&f.s_minus) * &two)),
        view.bx.c.clone() * K::from_rational(Rational::new(1.into(), 4.into())),
    );
    let (cu, cw) = f.to_frame(c);
    SearchWindow {
        u: (cu.clone() - a.clone(), cu + a),
        w: (cw.clone() - b.clone(), cw.clone() + b),
        h: cw,
    }
}

fn face_segment(frame: &EigenFrame<K>, u: &K, w: &(K, K)) -> EigenSegment<K> {
    EigenSegment {
        frame: frame.clone(),
        anchor: frame.from_frame(u, &w.0),
        axis: Axis::Minus,
        t: (K::zero(), w.1.clone() - w.0.clone()),
        open: (true, true),
    }
}

fn face_in(classes: &[LiftClass]) -> Option<(Face, K, (K, K))> {
    classes.iter().find_map(|c| match c {
        LiftClass::Face { face, u, w, .. } => Some((*face, u.clone(), w.clone())),
        _ => None,
    })
}

/// A contracting segment inside `F_N` within distance `radius` of `center`.
///
/// The window is kept free of every tube already examined. A tube whose lifts
/// only cross it as bands is cut away in the contracting direction, keeping the
/// reference slice; once a tube shows a contracting face inside the window the
/// open face piece is returned. Slices of deeper tubes get shorter than the
/// window, so a face must appear once `u_n` drops below its width.
pub fn find_segment(center: &Pt<K>, radius: &Rational, view: &FractalView) -> Result<FoundSegment, Error> {
    if !radius.is_positive() {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    if let (false, Some(n)) = view.membership(center) {
        return Err(Error::CenterNotInFractal(n));
    }
    let mut win = inscribed_window(view, center, radius);
    let mut steps: Vec<Step> = vec![];
    let mut from = 0;
    loop {
        let (n, classes) = match first_meeting_tube(view, &win, from) {
            Ok(x) => x,
            Err(Error::NoTubeMeetsWindow(d)) => return Err(Error::DepthBudgetExceeded(d)),
            Err(e) => return Err(e),
        };
        if let Some((face, u, w)) = face_in(&classes) {
            let segment = face_segment(view.frame(), &u, &w);
            let found = FoundSegment { segment, certified_depth: view.depth, tube: n, face, steps };
            if !verify_segment(&found, view) {
                return Err(Error::InvariantViolated(format!("face piece of tube {n} meets a tube")));
            }
            return Ok(found);
        }
        let above = classes.iter().filter_map(|c| match c {
            LiftClass::Above { bottom, .. } => Some(bottom.clone()),
            _ => None,
        });
        let below = classes.iter().filter_map(|c| match c {
            LiftClass::Below { top, .. } => Some(top.clone()),
            _ => None,
        });
        let (lo, hi) = (below.reduce(K::max_of), above.reduce(K::min_of));
        let kind = match (&lo, &hi) {
            (None, Some(_)) => StepKind::Case2A,
            (Some(_), None) => StepKind::Case2B,
            _ => StepKind::Mixed,
        };
        if kind == StepKind::Case2B {
            check_case_2b(view, &win, lo.as_ref().unwrap(), n)?;
        }
        let new_w = (
            lo.map_or(win.w.0.clone(), |x| K::max_of(x, win.w.0.clone())),
            hi.map_or(win.w.1.clone(), |x| K::min_of(x, win.w.1.clone())),
        );
        if !new_w.0.lt(&new_w.1) {
            return Err(Error::InvariantViolated("expanding faces of one tube coincide".into()));
        }
        win.w = new_w;
        steps.push(Step { depth: n, kind });
        from = n + 1;
    }
}

/// The window is met by tube `m` only through `𝔈′`: the next tube reaching
/// the free half above `h` must show a contracting face in the window.
fn check_case_2b(view: &FractalView, win: &SearchWindow, top: &K, m: usize) -> Result<(), Error> {
    let v = SearchWindow { u: win.u.clone(), w: (K::max_of(top.clone(), win.h.clone()), win.w.1.clone()), h: win.h.clone() };
    if !v.w.0.lt(&v.w.1) {
        return Ok(());
    }
    for n in m + 1..=view.depth {
        if classify_tube(&view.tubes[n], &v)?.is_some() {
            let whole = classify_tube(&view.tubes[n], win)?.unwrap_or_default();
            return match face_in(&whole) {
                Some(_) => Ok(()),
                None => Err(Error::InvariantViolated(format!("case 2B at depth {m} not followed by a face of tube {n}"))),
            };
        }
    }
    Ok(())
}

/// Exact disjointness of the segment from every tube up to the certified depth.
pub fn verify_segment(found: &FoundSegment, view: &FractalView) -> bool {
    let s = &found.segment;
    let dir_ok = s.axis == Axis::Minus && s.frame == *view.frame();
    dir_ok
        && found.certified_depth <= view.depth
        && view.tubes[..=found.certified_depth].iter().all(|t| segment_pgram_intersect(s, &t.pgram).is_empty())
}
