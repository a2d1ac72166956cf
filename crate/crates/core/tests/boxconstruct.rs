mod common;

use common::oracle::{Iv, OFrame};
use proptest::prelude::*;
use toral_core::automorphism::{orbit_and_period, RationalPoint, ToralAuto};
use toral_core::boxconstruct::{build_box, check_certificate, compute_alpha, default_y0, BoxPrimeSpec, ConstructionCertificate};
use toral_core::numbers::{rat, Scalar};
use toral_core::torusgeom::EigenFrame;
use toral_core::{Error, TowerExt};

/// `min |W|` over lifts `y + k`, `|k| ≤ 10`, with `U ∈ [0, u_max]`; `None` if a comparison is undecided.
fn alpha_oracle(y: &RationalPoint, u_max: &Iv, f: &OFrame) -> Option<(Iv, (i64, i64))> {
    let mut best: Option<(Iv, (i64, i64))> = None;
    for k1 in -10..=10 {
        for k2 in -10..=10 {
            let (u, w) = f.to_frame(&Iv::rat(&y.x).add(&Iv::int(k1)), &Iv::rat(&y.y).add(&Iv::int(k2)));
            let inside = match (u.lt(&Iv::int(0)), u_max.lt(&u)) {
                (Some(false), Some(false)) => true,
                (Some(_), Some(_)) => false,
                _ => return None,
            };
            if !inside {
                continue;
            }
            let a = w.max(&w.neg());
            best = match best {
                Some((b, kb)) => match a.lt(&b)? {
                    true => Some((a, (k1, k2))),
                    false => Some((b, kb)),
                },
                None => Some((a, (k1, k2))),
            };
        }
    }
    best
}

fn close(a: &Iv, b: &Iv) -> bool {
    let d = a.sub(b);
    let eps = Iv::rat(&rat(1, 1_000_000_000_000_000_000));
    d.lt(&eps) == Some(true) && eps.neg().lt(&d) == Some(true)
}

#[test]
fn alpha_matches_brute_force() {
    for (m, y, u_max) in [
        ([[2, 1], [1, 1]], (1, 5, 2, 5), rat(1, 10)),
        ([[2, 1], [1, 1]], (1, 3, 1, 7), rat(1, 4)),
        ([[3, 2], [1, 1]], (2, 9, 5, 9), rat(1, 5)),
        ([[5, 3], [3, 2]], (1, 2, 1, 4), rat(1, 3)),
    ] {
        let t = ToralAuto::analyze(m).unwrap();
        let y0 = RationalPoint::new(rat(y.0, y.1), rat(y.2, y.3));
        let spec = BoxPrimeSpec::new(u_max.clone(), rat(1, 10), y0.clone()).unwrap();
        let f = OFrame::of(&EigenFrame::of(&t));
        for (n, y) in orbit_and_period(&y0, &t).iter().enumerate() {
            let rec = compute_alpha(n, y, &spec, &t).unwrap();
            let (want, k) = alpha_oracle(y, &Iv::rat(&u_max), &f).expect("oracle undecided");
            assert!(close(&Iv::tower(&rec.alpha_n), &want), "{m:?} n={n}");
            assert_eq!(rec.k, k, "{m:?} n={n}");
        }
    }
}

#[test]
fn cat_box_certificate() {
    let (bx, cert) = common::cat_box();
    assert_eq!(check_certificate(&cert), Ok(()));
    assert_eq!(cert.orbit.len(), 2);
    assert!(bx.u_star.is_pos() && bx.c.is_pos());
    assert!(bx.u_star.le(&TowerExt::from_rational(rat(1, 10))));
    for s in &cert.separations {
        assert!(!s.margin.sign().is_negative());
    }
}

#[test]
fn certificate_json_round_trip() {
    let (_, cert) = common::cat_box();
    let s = serde_json::to_string(&cert).unwrap();
    let back: ConstructionCertificate = serde_json::from_str(&s).unwrap();
    assert_eq!(back, cert);
    assert!(check_certificate(&back).is_ok());
}

#[test]
fn tampered_certificate_is_rejected() {
    let (_, cert) = common::cat_box();
    let mut bad = cert.clone();
    bad.c = bad.c.clone() * TowerExt::from_int(100);
    assert!(check_certificate(&bad).is_err());
    let mut bad = cert.clone();
    bad.alpha_star = TowerExt::from_rational(rat(1, 1000));
    assert!(check_certificate(&bad).is_err());
    let mut bad = cert;
    bad.alphas[0].alpha_n = bad.alphas[0].alpha_n.clone() * TowerExt::from_int(2);
    assert!(check_certificate(&bad).is_err());
}

#[test]
fn construction_preconditions() {
    let spec = common::cat_spec();
    let neg = ToralAuto::analyze([[1, 1], [1, 0]]).unwrap();
    assert!(matches!(build_box(&spec, &neg, &rat(1, 20)), Err(Error::InvalidInput(_))));
    assert!(build_box(&spec, &common::cat(), &rat(0, 1)).is_err());
    assert!(BoxPrimeSpec::new(rat(1, 10), rat(1, 10), RationalPoint::origin()).is_err());
    assert!(BoxPrimeSpec::new(rat(0, 1), rat(1, 10), RationalPoint::new(rat(1, 2), rat(0, 1))).is_err());
}

#[test]
fn default_y0_lies_in_bprime() {
    let t = common::cat();
    let y = default_y0(&rat(1, 10), &rat(1, 10), &t, 50).unwrap();
    let spec = BoxPrimeSpec::new(rat(1, 10), rat(1, 10), y).unwrap();
    assert!(spec.y0_inside(&EigenFrame::of(&t)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_boxes_certify(a in 1i64..30, b in 1i64..30, den in 31i64..60, um in 5i64..20, wm in 5i64..20) {
        let y0 = RationalPoint::new(rat(a, den), rat(b, den));
        let spec = BoxPrimeSpec::new(rat(1, um), rat(1, wm), y0).unwrap();
        match build_box(&spec, &common::cat(), &rat(1, 20)) {
            Ok((bx, cert)) => {
                prop_assert!(check_certificate(&cert).is_ok());
                prop_assert!(bx.u_star.le(&TowerExt::from_rational(rat(1, um))));
            }
            Err(e) => prop_assert!(matches!(e, Error::PerturbationFailed | Error::DegenerateOrbit), "{e}"),
        }
    }

    #[test]
    fn wider_bprime_never_raises_alpha(a in 1i64..40, b in 1i64..40, den in 41i64..60) {
        let t = common::cat();
        let y = RationalPoint::new(rat(a, den), rat(b, den));
        let narrow = BoxPrimeSpec::new(rat(1, 10), rat(1, 10), y.clone()).unwrap();
        let wide = BoxPrimeSpec::new(rat(1, 5), rat(1, 10), y.clone()).unwrap();
        let (Ok(n), Ok(w)) = (compute_alpha(0, &y, &narrow, &t), compute_alpha(0, &y, &wide, &t)) else {
            return Ok(());
        };
        prop_assert!(!(w.alpha_n - n.alpha_n).sign().is_positive());
    }
}
