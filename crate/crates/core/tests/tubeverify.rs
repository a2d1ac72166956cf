mod common;

use toral_core::boxconstruct::BoxB;
use toral_core::numbers::rat;
use toral_core::tubeverify::{
    check_slice_lemmas, intersection_regions, lambda_pow, make_tube, make_tubes, proper_overlap, scan_no_proper_overlap,
    self_intersection_check, OverlapVerdict,
};
use toral_core::TowerExt;

#[test]
fn tube_lengths_scale_exactly() {
    let (bx, _) = common::cat_box();
    for n in 0..=12 {
        let t = make_tube(&bx, n);
        assert_eq!(t.u_len() * lambda_pow(&bx.t, n), bx.u_star);
        assert_eq!(t.w_len(), bx.c.clone() * lambda_pow(&bx.t, n));
        assert!(self_intersection_check(&t), "depth {n}");
    }
}

#[test]
fn verdicts_outside_and_inside() {
    let (bx, _) = common::cat_box();
    let tubes = make_tubes(&bx, 3);
    // (1/2, 1/2) is far from the box and its preimages
    let far = (TowerExt::from_rational(rat(1, 2)), TowerExt::from_rational(rat(1, 2)));
    assert_eq!(proper_overlap(&tubes[0], &tubes[1], &far), Ok(OverlapVerdict::NotIntersecting));
    for r in intersection_regions(&tubes[0], &tubes[2]) {
        let y = r.point(&bx.frame(), &TowerExt::from_rational(rat(1, 2)), &TowerExt::from_rational(rat(1, 2)));
        assert_eq!(proper_overlap(&tubes[0], &tubes[2], &y), Ok(OverlapVerdict::Improper));
    }
    assert!(proper_overlap(&tubes[2], &tubes[1], &far).is_err());
}

/// Origin-anchored boxes that skip the construction. `B′` itself (1/10 × 1/10)
/// happens to give no proper overlap up to depth 8; stretching `c` to 1/3 does.
#[test]
fn unconstructed_box_control() {
    let (real, _) = common::cat_box();
    let q = |a, b| TowerExt::from_rational(rat(a, b));
    let bprime = BoxB { u_star: q(1, 10), c: q(1, 10), ..real.clone() };
    assert_eq!(scan_no_proper_overlap(&bprime, 6).proper_count, 0);

    let tall = BoxB { u_star: q(1, 10), c: q(1, 3), ..real };
    let r = scan_no_proper_overlap(&tall, 8);
    assert!(r.proper_count > 0 && !r.pass);
    assert!(r.regions.iter().all(|x| x.samples_agree));
    let tubes = make_tubes(&tall, 8);
    for reg in r.regions.iter().filter(|x| matches!(x.verdict, OverlapVerdict::Proper(_))) {
        let region = intersection_regions(&tubes[reg.m], &tubes[reg.n]).into_iter().find(|g| g.k == reg.k).unwrap();
        let y = region.point(&tall.frame(), &q(1, 3), &q(2, 3));
        assert_eq!(proper_overlap(&tubes[reg.m], &tubes[reg.n], &y).unwrap(), reg.verdict);
        // the old slice's endpoint sits inside the newer tube
        let s = toral_core::torusgeom::slice_through(&y, &tubes[reg.m].pgram).unwrap();
        let end = match reg.verdict {
            OverlapVerdict::Proper(toral_core::tubeverify::Side::Unprimed) => s.x,
            _ => s.x_prime,
        };
        assert!(tubes[reg.n].pgram.contains(&end));
    }
}

#[test]
fn slice_lemmas_at_depth_six() {
    let (bx, _) = common::cat_box();
    let r = check_slice_lemmas(&bx, 6, 40, 99);
    assert!(r.pass, "{r:?}");
    assert!(r.lengths_exact && r.containment_checks == 40);
}
