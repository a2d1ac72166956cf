//! Witness points: on a segment of `F_N`, cut by expanded contracting leaves of
//! `S` through rational probes, so that the forward `T`-orbit misses `B` while
//! the forward `S`-orbit enters every probe.

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automorphism::{
    apply_matrix, check_transversality, orbit_and_period, orbit_avoids, reduce_mod1, Mat2, RationalPoint, ToralAuto,
};
use crate::boxconstruct::{direction_norm_upper, BoxB};
use crate::error::Error;
use crate::fractal::{find_segment, Face, FractalView, FoundSegment};
use crate::numbers::{serde_rational, Rational, Scalar, TowerExt};
use crate::torusgeom::{
    line_pgram_intersect, padd, pscale, psub, Axis, CrossingSolver, EigenFrame, EigenParallelogram, EigenSegment,
    FaceFlags, Pt,
};

type K = TowerExt;

/// Open parallelogram `P(r, 1/ell)` in the frame of `S`, with its contracting leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseProbe {
    pub r: RationalPoint,
    pub ell: u32,
    pub s: ToralAuto,
    /// Period of `r` under `S`.
    pub period: usize,
    /// `S`-iterates per leaf round: the least multiple of `period` with positive eigenvalues.
    pub round: usize,
    /// Half-extent in both frame coordinates; the diameter is at most `1/ell`.
    pub half: Rational,
    pub pgram: EigenParallelogram<K>,
    /// `𝔠_P`: the open leaf segment through `r` along `v₋(S)`.
    pub leaf: EigenSegment<K>,
}

pub fn make_probe(r: &RationalPoint, ell: u32, s: &ToralAuto) -> Result<DenseProbe, Error> {
    if ell == 0 {
        return Err(Error::InvalidInput("ell must be positive".into()));
    }
    let r = RationalPoint::new(r.x.clone(), r.y.clone());
    let period = orbit_and_period(&r, s).len();
    let positive = |e: u32| s.lambda_plus.pow(e).sign().is_positive() && s.lambda_minus.pow(e).sign().is_positive();
    let round = if positive(period as u32) { period } else { 2 * period };
    let frame = EigenFrame::of(s);
    let norms = direction_norm_upper(&frame.s_plus) + direction_norm_upper(&frame.s_minus);
    let half = (norms * Rational::from_integer((2 * ell).into())).recip();
    let h = K::from_rational(half.clone());
    let center = r.to_tower();
    let anchor = psub(&center, &frame.from_frame(&h, &h));
    let pgram = EigenParallelogram::new(
        frame.clone(),
        anchor,
        (K::zero(), h.clone() + h.clone()),
        (K::zero(), h.clone() + h.clone()),
        FaceFlags::OPEN,
    )?;
    let leaf = EigenSegment { frame, anchor: center, axis: Axis::Minus, t: (-h.clone(), h), open: (true, true) };
    Ok(DenseProbe { r, ell, s: s.clone(), period, round, half, pgram, leaf })
}

impl DenseProbe {
    /// Expansion of the leaf per round, `λ₋(S)^{-round}`.
    pub fn growth(&self) -> K {
        K::from_quad(&self.s.lambda_minus.pow(self.round as u32)).inv().expect("eigenvalue is nonzero")
    }

    /// Half-length (in `v₋` units) of `S^{-m·round}(𝔠_P)`.
    pub fn leaf_half_length(&self, m: u32) -> K {
        K::from_rational(self.half.clone()) * self.growth().pow(m)
    }

    pub fn contains(&self, p: &Pt<K>) -> bool {
        self.pgram.contains(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeafCut {
    /// Rounds of `S^{-round}` applied to `𝔠_P`.
    pub rounds: u32,
    pub leaf_half_length: K,
    /// Parameter along the leaf through `r` (units of `v₋(S)`).
    pub leaf_t: K,
    /// Parameter along the target segment.
    pub target_t: K,
    pub k: (i64, i64),
    pub point: Pt<K>,
}

/// Expands `𝔠_P` round by round until it cuts `target`; returns the crossing
/// nearest to `r` along the leaf.
pub fn expand_leaf_until_cut(probe: &DenseProbe, target: &EigenSegment<K>, max_rounds: u32) -> Result<LeafCut, Error> {
    let leaf = &probe.leaf;
    let solver = CrossingSolver::new(
        leaf.anchor.clone(),
        leaf.direction(),
        target.anchor.clone(),
        target.direction(),
        target.t.clone(),
        target.open,
    )?;
    let reach = probe.leaf_half_length(max_rounds);
    let reach_int = reach.floor();
    // the leaf direction has x-component 1, so |t| ≥ |k1 − center| − slack
    let (c, slack) = (solver.k1_center(), solver.k1_slack());
    let mut best: Option<crate::torusgeom::Crossing<K>> = None;
    let mut d: i64 = 0;
    loop {
        let bound = match &best {
            Some(b) => b.t.abs_val().floor(),
            None => reach_int.clone(),
        };
        if num_bigint::BigInt::from(d - slack - 1) > bound {
            break;
        }
        let ks = if d == 0 { vec![c] } else { vec![c - d, c + d] };
        for k1 in ks {
            for x in solver.crossings_at_k1(k1) {
                if best.as_ref().is_none_or(|b| x.t.abs_val().lt(&b.t.abs_val())) {
                    best = Some(x);
                }
            }
        }
        d += 1;
    }
    let Some(x) = best.filter(|b| b.t.abs_val().lt(&reach)) else {
        return Err(Error::IterationBudgetExceeded { leaf_length: reach.to_f64() });
    };
    let at = x.t.abs_val();
    let rounds = (0..=max_rounds).find(|&m| at.lt(&probe.leaf_half_length(m))).expect("bounded by reach");
    Ok(LeafCut { rounds, leaf_half_length: probe.leaf_half_length(rounds), leaf_t: x.t, target_t: x.s, k: x.k, point: x.point })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceCertificate {
    pub matrix: Mat2,
    pub depth: usize,
    pub base_point: RationalPoint,
}

/// Exact forward iteration of `x` under `box.t`, iterates `0..=depth`, none in open `B`.
pub fn certify_t_avoidance(x: &Pt<K>, bx: &BoxB, depth: usize) -> Result<AvoidanceCertificate, Error> {
    certify_t_avoidance_at(x, bx, depth, &RationalPoint::origin())
}

/// As [`certify_t_avoidance`] for the box translated to the base point `p`.
pub fn certify_t_avoidance_at(x: &Pt<K>, bx: &BoxB, depth: usize, p: &RationalPoint) -> Result<AvoidanceCertificate, Error> {
    let pg = bx.pgram();
    // T^q fixes p, so T^q(y + p) ≡ T^q y + p
    let shifted = psub(x, &p.to_tower());
    let hit = orbit_avoids(&bx.t.matrix, &shifted, depth, |y| pg.contains(y));
    match hit {
        Some(n) => Err(Error::AvoidanceFailed(n)),
        None => Ok(AvoidanceCertificate { matrix: bx.t.matrix, depth, base_point: p.clone() }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEvidence {
    pub grid_k: u32,
    pub horizon: usize,
    pub cells_visited: usize,
    /// First iterate at which every cell has been visited.
    pub first_full_cover: Option<usize>,
}

/// Visited cells of the `k×k` grid along the exact `S`-orbit, iterates `0..=horizon`.
pub fn density_evidence(x: &Pt<K>, s: &ToralAuto, grid_k: u32, horizon: usize) -> Result<DensityEvidence, Error> {
    if grid_k == 0 {
        return Err(Error::InvalidInput("grid size must be positive".into()));
    }
    let k = grid_k as usize;
    let kk = K::from_int(grid_k as i64);
    let mut seen = vec![false; k * k];
    let mut count = 0;
    let mut cur = reduce_mod1(x);
    let mut first_full_cover = None;
    for i in 0..=horizon {
        let cx = (kk.clone() * cur.0.clone()).floor();
        let cy = (kk.clone() * cur.1.clone()).floor();
        let idx = cx.to_usize().expect("reduced coordinate") * k + cy.to_usize().expect("reduced coordinate");
        if !seen[idx] {
            seen[idx] = true;
            count += 1;
        }
        if count == k * k {
            first_full_cover = Some(i);
            break;
        }
        cur = reduce_mod1(&apply_matrix(&s.matrix, &cur));
    }
    Ok(DensityEvidence { grid_k, horizon, cells_visited: count, first_full_cover })
}

/// First `v ≤ horizon` with `S^v(x)` in the probe, by fresh exact iteration.
pub fn first_visit(x: &Pt<K>, probe: &DenseProbe, horizon: usize) -> Option<usize> {
    first_visits(x, &probe.s, std::slice::from_ref(probe), horizon)[0]
}

/// [`first_visit`] for several probes of the same `S`, along one orbit.
pub fn first_visits(x: &Pt<K>, s: &ToralAuto, probes: &[DenseProbe], horizon: usize) -> Vec<Option<usize>> {
    let mut out = vec![None; probes.len()];
    let mut left = probes.len();
    let mut cur = reduce_mod1(x);
    for v in 0..=horizon {
        if left == 0 {
            break;
        }
        for (o, p) in out.iter_mut().zip(probes) {
            if o.is_none() && p.contains(&cur) {
                *o = Some(v);
                left -= 1;
            }
        }
        cur = reduce_mod1(&apply_matrix(&s.matrix, &cur));
    }
    out
}

/// Open parameter intervals of `J ⊂ seg` whose `S^v`-image lies in the probe.
///
/// `J` is reparametrised to `(0, 1)` so the pushed-forward direction stays moderate.
struct Pusher<'a> {
    probe: &'a DenseProbe,
    lo: K,
    len: K,
    base: Pt<K>,
    dir: Pt<K>,
    v: usize,
}

impl<'a> Pusher<'a> {
    fn new(seg: &EigenSegment<K>, j: &(K, K), probe: &'a DenseProbe) -> Self {
        let len = j.1.clone() - j.0.clone();
        let base = reduce_mod1(&seg.point_at(&j.0));
        let dir = pscale(&seg.direction(), &len);
        Pusher { probe, lo: j.0.clone(), len, base, dir, v: 0 }
    }

    fn step(&mut self) {
        let m = &self.probe.s.matrix;
        self.base = reduce_mod1(&apply_matrix(m, &self.base));
        self.dir = apply_matrix(m, &self.dir);
        self.v += 1;
    }

    /// Sub-intervals of `J` (segment parameters) landing in the probe at the current `v`.
    fn hits(&self) -> Vec<(K, K)> {
        if self.dir.0.sign().is_zero() {
            return vec![];
        }
        line_pgram_intersect(&self.base, &self.dir, (&K::zero(), &K::one()), (true, true), &self.probe.pgram)
            .into_iter()
            .filter(|iv| !iv.is_empty())
            .map(|iv| {
                (
                    self.lo.clone() + iv.lo * self.len.clone(),
                    self.lo.clone() + iv.hi * self.len.clone(),
                )
            })
            .collect()
    }
}

/// Above this many wraps per push the search gives up on the probe.
const MAX_WRAPS: f64 = 1.0e6;

fn longest(ivs: Vec<(K, K)>) -> Option<(K, K)> {
    ivs.into_iter().reduce(|a, b| {
        if (a.1.clone() - a.0.clone()).lt(&(b.1.clone() - b.0.clone())) {
            b
        } else {
            a
        }
    })
}

/// Least `v ≤ horizon` with `S^v(J)` meeting the probe, and the longest such piece of `J`.
fn refine(seg: &EigenSegment<K>, j: &(K, K), probe: &DenseProbe, horizon: usize) -> Option<(usize, (K, K))> {
    let mut p = Pusher::new(seg, j, probe);
    loop {
        if let Some(iv) = longest(p.hits()) {
            return Some((p.v, iv));
        }
        if p.v >= horizon || p.dir.0.to_f64().abs() > MAX_WRAPS {
            return None;
        }
        p.step();
    }
}

/// The piece of `J` around `t` whose `S^v`-image lies in the probe.
fn piece_at(seg: &EigenSegment<K>, j: &(K, K), probe: &DenseProbe, v: usize, t: &K) -> Option<(K, K)> {
    let mut p = Pusher::new(seg, j, probe);
    for _ in 0..v {
        p.step();
    }
    p.hits().into_iter().find(|(a, b)| a.lt(t) && t.lt(b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessOptions {
    pub fractal_depth: usize,
    /// Center of the search ball; default is the first small-denominator point of `F_N`.
    pub center: Option<RationalPoint>,
    #[serde(with = "serde_rational")]
    pub radius: Rational,
    pub avoid_depth: usize,
    pub horizon: usize,
    pub grid_k: u32,
    /// Add one auxiliary probe per grid cell so the orbit is driven through every cell.
    pub grid_probes: bool,
    pub max_rounds: u32,
    /// Replaces the origin; the box must then be built for the positivized power of `T` fixing it.
    pub base_point: Option<RationalPoint>,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            fractal_depth: 10,
            center: None,
            radius: Rational::new(1.into(), 20.into()),
            avoid_depth: 200,
            horizon: 5000,
            grid_k: 8,
            grid_probes: true,
            max_rounds: 64,
            base_point: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    /// The segment is `anchor + t·v₋(T)` for `t` in the open range.
    pub anchor: Pt<K>,
    pub t: (K, K),
    pub tube: usize,
    pub face: Face,
    pub certified_depth: usize,
    pub center: RationalPoint,
    #[serde(with = "serde_rational")]
    pub radius: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeVisit {
    pub probe: usize,
    pub r: RationalPoint,
    pub ell: u32,
    pub period: usize,
    pub auxiliary: bool,
    /// First iterate inside the probe; `None` if not reached within the horizon.
    pub iterate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafCutRecord {
    pub probe: usize,
    pub rounds: u32,
    pub leaf_t: K,
    pub target_t: K,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub t_matrix: Mat2,
    pub s_matrix: Mat2,
    pub transversal: bool,
    pub point: Pt<K>,
    /// Segment parameter of the point and the final open interval around it.
    pub point_t: K,
    pub interval: (K, K),
    pub segment: SegmentRecord,
    /// Half the clearance from the segment to the other tubes, in `v₊` units.
    pub thickening: K,
    pub leaf_cut: Option<LeafCutRecord>,
    pub avoidance: AvoidanceCertificate,
    pub visits: Vec<ProbeVisit>,
    pub density: DensityEvidence,
}

/// Center of the default search: the first `(a/d, b/d)` lying in `F_N`.
pub fn default_center(view: &FractalView) -> RationalPoint {
    for d in 3i64..200 {
        for a in 1..d {
            for b in 1..d {
                let p = RationalPoint::new(Rational::new(a.into(), d.into()), Rational::new(b.into(), d.into()));
                if view.membership(&p.to_tower()).0 {
                    return p;
                }
            }
        }
    }
    unreachable!("F_N has positive measure")
}

/// Half the least positive `v₊`-gap from the segment to tube lifts sharing its `w`-range, capped by `u*`.
pub fn thickening(found: &FoundSegment, view: &FractalView) -> K {
    let f = view.frame();
    let (uf, wa) = f.to_frame(&found.segment.anchor);
    let (w0, w1) = (wa.clone() + found.segment.t.0.clone(), wa + found.segment.t.1.clone());
    let cap = view.bx.u_star.clone();
    let mut best = cap.clone();
    for tube in &view.tubes {
        let (un, wn) = (tube.u_len(), tube.w_len());
        let lifts = f.lattice_in_box(
            &(uf.clone() - cap.clone() - un.clone()),
            &(uf.clone() + cap.clone()),
            &(w0.clone() - wn.clone()),
            &w1,
        );
        for h in lifts {
            let gap = if uf.le(&h.u) {
                h.u.clone() - uf.clone()
            } else {
                uf.clone() - (h.u.clone() + un.clone())
            };
            if gap.is_pos() && gap.lt(&best) {
                best = gap;
            }
        }
    }
    best.half()
}

fn grid_cells(k: u32) -> Vec<RationalPoint> {
    let den = 2 * k as i64;
    let mut out = vec![];
    for i in 0..k as i64 {
        for j in 0..k as i64 {
            out.push(RationalPoint::new(Rational::new((2 * i + 1).into(), den.into()), Rational::new((2 * j + 1).into(), den.into())));
        }
    }
    out
}

/// The full pipeline: a segment of `F_N`, cut by the first probe's expanded
/// leaf, then narrowed to points whose `S`-orbit enters every further probe.
/// Cutting `J` with `S^{-v}(P)` is the same as pushing `J` forward into `P`,
/// which keeps the search bounded by the wrap count of `S^v(J)`.
pub fn make_witness(
    t: &ToralAuto,
    s: &ToralAuto,
    bx: &BoxB,
    probes: &[DenseProbe],
    opts: &WitnessOptions,
) -> Result<WitnessReport, Error> {
    let transversal = check_transversality(t, s);
    if !transversal {
        return Err(Error::TransversalityViolated);
    }
    let base = opts.base_point.clone().unwrap_or_else(RationalPoint::origin);
    let q = orbit_and_period(&base, t).len() as u32;
    let expected = t.power(q).positivize().0;
    if bx.t.matrix != expected.matrix {
        return Err(Error::InvalidInput(format!("box is built for {}, expected {}", bx.t, expected)));
    }
    if let Some(p) = probes.iter().find(|p| p.s.matrix != s.matrix) {
        return Err(Error::InvalidInput(format!("probe at {:?} is for {}, not {}", p.r, p.s, s)));
    }
    let view = FractalView::new(bx.clone(), opts.fractal_depth);
    let center = opts.center.clone().unwrap_or_else(|| default_center(&view));
    let found = find_segment(&center.to_tower(), &opts.radius, &view)?;
    let tau = thickening(&found, &view);

    let mut seg = found.segment.clone();
    seg.anchor = padd(&seg.anchor, &base.to_tower());
    let mut j = seg.t.clone();

    let mut all: Vec<(DenseProbe, bool)> = probes.iter().map(|p| (p.clone(), false)).collect();
    if opts.grid_probes {
        for r in grid_cells(opts.grid_k) {
            all.push((make_probe(&r, 2 * opts.grid_k + 1, s)?, true));
        }
    }

    let mut leaf_cut = None;
    let mut start = 0;
    if let Some((p0, _)) = all.first() {
        let cut = expand_leaf_until_cut(p0, &seg, opts.max_rounds)?;
        let v = first_visit(&cut.point, p0, cut.rounds as usize * p0.round)
            .ok_or_else(|| Error::InvariantViolated("leaf cut does not return to its probe".into()))?;
        j = piece_at(&seg, &j, p0, v, &cut.target_t)
            .ok_or_else(|| Error::InvariantViolated("leaf cut is not interior to its pull-back".into()))?;
        leaf_cut = Some(LeafCutRecord { probe: 0, rounds: cut.rounds, leaf_t: cut.leaf_t, target_t: cut.target_t });
        start = 1;
    }
    let mut reached = vec![true; all.len()];
    for (i, (p, _)) in all.iter().enumerate().skip(start) {
        match refine(&seg, &j, p, opts.horizon) {
            Some((_, iv)) => j = iv,
            None => reached[i] = false,
        }
    }

    let point_t = (j.0.clone() + j.1.clone()).half();
    let point = seg.point_at(&point_t);
    let avoidance = certify_t_avoidance_at(&point, bx, opts.avoid_depth, &base)?;
    let plain: Vec<DenseProbe> = all.iter().map(|(p, _)| p.clone()).collect();
    let firsts = first_visits(&point, s, &plain, opts.horizon);
    let mut visits = vec![];
    for (i, ((p, aux), iterate)) in all.iter().zip(firsts).enumerate() {
        if reached[i] && iterate.is_none() {
            return Err(Error::InvariantViolated(format!("probe {i} was refined but is not visited")));
        }
        visits.push(ProbeVisit { probe: i, r: p.r.clone(), ell: p.ell, period: p.period, auxiliary: *aux, iterate });
    }
    let density = density_evidence(&point, s, opts.grid_k, opts.horizon)?;
    Ok(WitnessReport {
        t_matrix: t.matrix,
        s_matrix: s.matrix,
        transversal,
        point,
        point_t,
        interval: j,
        segment: SegmentRecord {
            anchor: seg.anchor.clone(),
            t: seg.t.clone(),
            tube: found.tube,
            face: found.face,
            certified_depth: found.certified_depth,
            center,
            radius: opts.radius.clone(),
        },
        thickening: tau,
        leaf_cut,
        avoidance,
        visits,
        density,
    })
}

/// Independent re-check of a report: segment disjointness, avoidance, every
/// claimed visit and the density record, all by fresh exact computation.
pub fn check_report(rep: &WitnessReport, bx: &BoxB) -> Result<(), String> {
    let t = ToralAuto::analyze(rep.t_matrix).map_err(|e| e.to_string())?;
    let s = ToralAuto::analyze(rep.s_matrix).map_err(|e| e.to_string())?;
    if rep.transversal != check_transversality(&t, &s) {
        return Err("transversality flag disagrees".into());
    }
    if bx.t.matrix != rep.avoidance.matrix {
        return Err("box does not match the avoidance certificate".into());
    }
    let frame = bx.frame();
    let seg = EigenSegment {
        frame: frame.clone(),
        anchor: rep.segment.anchor.clone(),
        axis: Axis::Minus,
        t: rep.segment.t.clone(),
        open: (true, true),
    };
    let (a, b) = &rep.interval;
    if !(seg.t.0.le(a) && a.lt(&rep.point_t) && rep.point_t.lt(b) && b.le(&seg.t.1)) {
        return Err("point parameter is not inside the recorded interval".into());
    }
    if seg.point_at(&rep.point_t) != rep.point {
        return Err("point is not on the recorded segment".into());
    }
    let base = rep.avoidance.base_point.to_tower();
    let local = EigenSegment { anchor: psub(&seg.anchor, &base), ..seg.clone() };
    let view = FractalView::new(bx.clone(), rep.segment.certified_depth);
    let found = FoundSegment {
        segment: local,
        certified_depth: rep.segment.certified_depth,
        tube: rep.segment.tube,
        face: rep.segment.face,
        steps: vec![],
    };
    if !crate::fractal::verify_segment(&found, &view) {
        return Err("segment meets a tube".into());
    }
    certify_t_avoidance_at(&rep.point, bx, rep.avoidance.depth, &rep.avoidance.base_point).map_err(|e| e.to_string())?;
    let mut probes = vec![];
    for v in &rep.visits {
        let p = make_probe(&v.r, v.ell, &s).map_err(|e| e.to_string())?;
        if p.period != v.period {
            return Err(format!("probe {} period mismatch", v.probe));
        }
        probes.push(p);
    }
    let firsts = first_visits(&rep.point, &s, &probes, rep.density.horizon);
    if let Some((v, _)) = rep.visits.iter().zip(&firsts).find(|(v, f)| v.iterate != **f) {
        return Err(format!("probe {} visit does not replay", v.probe));
    }
    let d = density_evidence(&rep.point, &s, rep.density.grid_k, rep.density.horizon).map_err(|e| e.to_string())?;
    if d != rep.density {
        return Err("density evidence does not replay".into());
    }
    Ok(())
}

/// `T`-orbit of `x` stays out of `B` for iterates `0..=2k` iff the `T²`-orbits
/// of `x` and `Tx` do for `0..=k` and `0..=k−1`.
pub fn avoidance_parity_check(t: &Mat2, x: &Pt<K>, inside: impl Fn(&Pt<K>) -> bool, k: usize) -> (bool, bool) {
    let t2 = crate::automorphism::mat_mul(t, t);
    let direct = orbit_avoids(t, x, 2 * k, &inside).is_none();
    let even = orbit_avoids(&t2, x, k, &inside).is_none();
    let odd = k == 0 || orbit_avoids(&t2, &apply_matrix(t, x), k - 1, &inside).is_none();
    (direct, even && odd)
}
