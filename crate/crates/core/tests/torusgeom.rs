mod common;

use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toral_core::numbers::{rat, Scalar};
use toral_core::torusgeom::{
    lattice_candidates, plattice, segment_crossings, segment_pgram_intersect, slice_through, Axis, EigenFrame, EigenSegment, Pt,
};
use toral_core::TowerExt;

type K = TowerExt;

fn q(a: i64, b: i64) -> K {
    K::from_rational(rat(a, b))
}

#[test]
fn frame_of_cat_map() {
    let f = EigenFrame::<K>::of(&common::cat());
    let (u, w) = f.to_frame(&(q(1, 1), q(0, 1)));
    assert_eq!(u.clone() + w.clone(), q(1, 1));
    assert_eq!(f.from_frame(&u, &w), (q(1, 1), q(0, 1)));
    assert!(u.is_pos() && w.is_pos());
}

#[test]
fn lattice_candidates_are_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let p = common::instances::pgram(&mut rng);
        let target: Vec<Pt<K>> = (0..3).map(|_| common::instances::point(&mut rng, &p)).collect();
        let got: Vec<_> = lattice_candidates(&p, &target).into_iter().map(|h| h.k).collect();
        let closed = p.closure();
        for k1 in -8..=8 {
            for k2 in -8..=8 {
                if target.iter().any(|t| {
                    let (u, w) = closed.rel(&plattice(t, (k1, k2)));
                    closed.contains_frame(&u, &w)
                }) {
                    assert!(got.contains(&(k1, k2)), "missing {k1},{k2}");
                }
            }
        }
    }
}

#[test]
fn tube_candidates_grow_with_length() {
    let (bx, _) = common::cat_box();
    let origin = vec![(K::zero(), K::zero())];
    let counts: Vec<usize> = (0..=10)
        .map(|n| lattice_candidates(&toral_core::tubeverify::make_tube(&bx, n).pgram, &origin).len())
        .collect();
    // the tube has area c·u*, so a single point has few translates near it
    assert!(counts.iter().all(|&c| c <= 4), "{counts:?}");
}

#[test]
fn slice_through_box_center() {
    let (bx, _) = common::cat_box();
    let s = slice_through(&bx.center(), &bx.pgram()).unwrap();
    assert_eq!(s.length(), bx.u_star);
    let f = bx.frame();
    let (du, dw) = f.to_frame(&(s.x_prime.0.clone() - s.x.0.clone(), s.x_prime.1.clone() - s.x.1.clone()));
    assert_eq!((du, dw), (bx.u_star.clone(), K::zero()));
    assert!(slice_through(&(q(1, 2), q(1, 2)), &bx.pgram()).is_err());
}

#[test]
fn unstable_leaves_cross() {
    let t = common::cat();
    let s = common::s_map();
    let a = EigenSegment { frame: EigenFrame::of(&t), anchor: (K::zero(), K::zero()), axis: Axis::Minus, t: (q(-2, 1), q(2, 1)), open: (false, false) };
    let b = EigenSegment { frame: EigenFrame::of(&s), anchor: (q(1, 3), q(1, 5)), axis: Axis::Minus, t: (q(-2, 1), q(2, 1)), open: (false, false) };
    let cs = segment_crossings(&a, &b).unwrap();
    assert!(!cs.is_empty());
    for c in &cs {
        assert_eq!(plattice(&a.point_at(&c.t), c.k), b.point_at(&c.s));
        assert_eq!(c.point, b.point_at(&c.s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_round_trip(seed in any::<u64>(), x in -99i64..99, y in -99i64..99) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = common::instances::small_frame(&mut rng);
        let p = (q(x, 13), q(y, 7) + K::sqrt(2));
        let (u, w) = f.to_frame(&p);
        prop_assert_eq!(f.from_frame(&u, &w), p);
    }

    #[test]
    fn membership_is_lattice_invariant(seed in any::<u64>(), k1 in -5i64..5, k2 in -5i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::instances::pgram(&mut rng);
        let x = common::instances::point(&mut rng, &p);
        prop_assert_eq!(p.contains(&x), p.contains(&plattice(&x, (k1, k2))));
    }

    #[test]
    fn intersection_is_sound_and_invariant(seed in any::<u64>(), k1 in -3i64..3, k2 in -3i64..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::instances::pgram(&mut rng);
        let s = common::instances::segment(&mut rng, &p);
        let got = segment_pgram_intersect(&s, &p);
        for iv in &got {
            prop_assert!(!iv.is_empty());
            let mid = (iv.lo.clone() + iv.hi.clone()).half();
            prop_assert!(s.contains_param(&mid));
            prop_assert!(p.contains(&s.point_at(&mid)));
        }
        let moved = EigenSegment { anchor: plattice(&s.anchor, (k1, k2)), ..s.clone() };
        let mut a: Vec<_> = got.iter().map(|i| (i.lo.to_f64(), i.hi.to_f64())).collect();
        let mut b: Vec<_> = segment_pgram_intersect(&moved, &p).iter().map(|i| (i.lo.to_f64(), i.hi.to_f64())).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        prop_assert_eq!(a, b);
    }
}
