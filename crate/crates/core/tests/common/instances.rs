//! Random instances for the geometry kernels.

use rand::Rng;
use toral_core::automorphism::{Mat2, ToralAuto};
use toral_core::numbers::rat;
use toral_core::torusgeom::{Axis, EigenFrame, EigenParallelogram, EigenSegment, FaceFlags, Pt};
use toral_core::TowerExt;

type K = TowerExt;

pub fn q<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> K {
    K::from_rational(rat(rng.gen_range(lo..=hi), den))
}

/// Random unimodular hyperbolic matrix with `|trace| ≤ max_trace`, as a product of shears.
pub fn hyperbolic<R: Rng>(rng: &mut R, max_trace: i64) -> ToralAuto {
    loop {
        let mut m: Mat2 = [[1, 0], [0, 1]];
        for _ in 0..rng.gen_range(2..5) {
            let a = rng.gen_range(-3..=3);
            let e: Mat2 = if rng.gen() { [[1, a], [0, 1]] } else { [[1, 0], [a, 1]] };
            m = toral_core::automorphism::mat_mul(&m, &e);
        }
        if rng.gen_bool(0.25) {
            m = toral_core::automorphism::mat_mul(&m, &[[0, 1], [1, 0]]);
        }
        if (m[0][0] + m[1][1]).abs() > max_trace {
            continue;
        }
        if let Ok(t) = ToralAuto::analyze(m) {
            return t;
        }
    }
}

const SMALL: [Mat2; 5] = [[[2, 1], [1, 1]], [[1, 1], [1, 2]], [[3, 1], [2, 1]], [[0, 1], [1, 1]], [[1, 2], [1, 3]]];

pub fn small_frame<R: Rng>(rng: &mut R) -> EigenFrame<K> {
    EigenFrame::of(&ToralAuto::analyze(SMALL[rng.gen_range(0..SMALL.len())]).unwrap())
}

pub fn flags<R: Rng>(rng: &mut R) -> FaceFlags {
    FaceFlags { u_lo: rng.gen(), u_hi: rng.gen(), w_lo: rng.gen(), w_hi: rng.gen() }
}

pub fn pgram<R: Rng>(rng: &mut R) -> EigenParallelogram<K> {
    let f = small_frame(rng);
    let anchor = (q(rng, 0, 99, 100), q(rng, 0, 99, 100));
    let u0 = q(rng, -30, 30, 100);
    let w0 = q(rng, -30, 30, 100);
    let u1 = u0.clone() + q(rng, 1, 60, 100);
    let w1 = w0.clone() + q(rng, 1, 60, 100);
    EigenParallelogram::new(f, anchor, (u0, u1), (w0, w1), flags(rng)).unwrap()
}

/// Rational or quadratic-irrational point; sometimes a vertex or face point of `p`.
pub fn point<R: Rng>(rng: &mut R, p: &EigenParallelogram<K>) -> Pt<K> {
    match rng.gen_range(0..4) {
        0 => p.vertices()[rng.gen_range(0..4)].clone(),
        1 => p.point_at(&p.u.0, &(p.w.0.clone() + p.w_len() * q(rng, 1, 9, 10))),
        2 => (q(rng, -100, 200, 100), q(rng, -100, 200, 100)),
        _ => {
            let r = K::sqrt([2, 3, 5][rng.gen_range(0..3)]);
            (q(rng, 0, 99, 100) + r.clone() * q(rng, -9, 9, 10), q(rng, 0, 99, 100) + r * q(rng, -9, 9, 10))
        }
    }
}

pub fn segment<R: Rng>(rng: &mut R, p: &EigenParallelogram<K>) -> EigenSegment<K> {
    let frame = if rng.gen_bool(0.4) { p.frame.clone() } else { small_frame(rng) };
    let anchor = if rng.gen_bool(0.3) { p.center() } else { (q(rng, 0, 99, 100), q(rng, 0, 99, 100)) };
    let t0 = q(rng, -150, 50, 100);
    let t1 = t0.clone() + q(rng, 1, 200, 100);
    EigenSegment {
        frame,
        anchor,
        axis: if rng.gen() { Axis::Plus } else { Axis::Minus },
        t: (t0, t1),
        open: (rng.gen(), rng.gen()),
    }
}

#[allow(dead_code)]
pub fn abs_f64(x: &K) -> f64 {
    x.to_f64().abs()
}
