mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::SeedableRng;
use toral_core::automorphism::{check_transversality, mat_mul, mat_pow, orbit_and_period, parse_matrix, Mat2, RationalPoint, ToralAuto};
use toral_core::numbers::{rat, QuadExt};
use toral_core::{Error, TowerExt};

#[test]
fn cat_map_eigendata() {
    let t = common::cat();
    assert_eq!((t.det, t.trace, t.d), (1, 3, 5));
    assert_eq!(t.lambda_plus, QuadExt::new(rat(3, 2), rat(1, 2), 5));
    assert_eq!(t.lambda_minus, QuadExt::new(rat(3, 2), rat(-1, 2), 5));
    assert_eq!(t.slope_plus, QuadExt::new(rat(-1, 2), rat(1, 2), 5));
    assert_eq!(t.slope_minus, QuadExt::new(rat(-1, 2), rat(-1, 2), 5));
    assert!(t.eigen_residuals().iter().all(|r| r.sign().is_zero()));
}

#[test]
fn rejects_bad_matrices() {
    assert_eq!(ToralAuto::analyze([[2, 0], [0, 1]]), Err(Error::NotUnimodular));
    assert_eq!(ToralAuto::analyze([[1, 1], [0, 1]]), Err(Error::NotHyperbolic));
    assert_eq!(ToralAuto::analyze([[0, 1], [1, 0]]), Err(Error::NotHyperbolic));
    assert_eq!(ToralAuto::analyze([[1, 1], [-1, 1]]), Err(Error::NotUnimodular));
    assert_eq!(ToralAuto::analyze([[0, -1], [1, 1]]), Err(Error::NotHyperbolic));
}

#[test]
fn parses_both_matrix_forms() {
    assert_eq!(parse_matrix("2,1,1,1").unwrap(), [[2, 1], [1, 1]]);
    assert_eq!(parse_matrix("[[2, 1], [1, 1]]").unwrap(), [[2, 1], [1, 1]]);
    assert!(parse_matrix("1,2,3").is_err());
}

#[test]
fn positivization() {
    let (sq, e) = ToralAuto::analyze([[1, 1], [1, 0]]).unwrap().positivize();
    assert_eq!((sq.matrix, e), ([[2, 1], [1, 1]], 2));
    let (same, e) = common::cat().positivize();
    assert_eq!((same.matrix, e), ([[2, 1], [1, 1]], 1));
    let (neg, e) = ToralAuto::analyze([[-2, -1], [-1, -1]]).unwrap().positivize();
    assert_eq!((neg.matrix, e), ([[5, 3], [3, 2]], 2));
}

#[test]
fn orbit_of_half_point() {
    let t = common::cat();
    let o = orbit_and_period(&RationalPoint::new(rat(1, 2), rat(1, 2)), &t);
    let want = [(1, 2, 1, 2), (1, 2, 0, 1), (0, 1, 1, 2)];
    assert_eq!(o.len(), 3);
    for (p, (a, b, c, d)) in o.iter().zip(want) {
        assert_eq!(p, &RationalPoint::new(rat(a, b), rat(c, d)));
    }
    assert_eq!(mat_pow(&t.matrix, 3), [[13, 8], [8, 5]]);
}

#[test]
fn transversality_examples() {
    let t = common::cat();
    assert!(check_transversality(&t, &common::s_map()));
    assert!(!check_transversality(&t, &t.power(2)));
    // the inverse swaps the eigenlines
    let inv = ToralAuto::analyze(t.inverse_matrix()).unwrap();
    assert!(check_transversality(&t, &inv));
}

/// Period of `(a/q, b/q)` by iterating integer residues mod `q`.
fn brute_period(m: &Mat2, a: i64, b: i64, q: i64) -> usize {
    let step = |(x, y): (i64, i64)| ((m[0][0] * x + m[0][1] * y).rem_euclid(q), (m[1][0] * x + m[1][1] * y).rem_euclid(q));
    let mut seen = HashMap::new();
    let mut cur = (a.rem_euclid(q), b.rem_euclid(q));
    for i in 0.. {
        if let Some(j) = seen.insert(cur, i) {
            return i - j;
        }
        cur = step(cur);
    }
    unreachable!()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_maps_are_exact(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = common::instances::hyperbolic(&mut rng, 20);
        prop_assert!(t.eigen_residuals().iter().all(|r| r.sign().is_zero()));
        prop_assert!(t.lambda_plus.abs().sign().is_positive());
        prop_assert!((t.lambda_plus.abs() - QuadExt::from_int(1)).sign().is_positive());
        let (p, _) = t.positivize();
        prop_assert!(p.has_positive_eigenvalues());
        prop_assert_eq!(mat_mul(&t.matrix, &t.inverse_matrix()), [[1, 0], [0, 1]]);
    }

    #[test]
    fn period_matches_residue_iteration(seed in any::<u64>(), q in 2i64..40, a in 0i64..40, b in 0i64..40) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = common::instances::hyperbolic(&mut rng, 12);
        let p = RationalPoint::new(rat(a, q), rat(b, q));
        let o = orbit_and_period(&p, &t);
        prop_assert_eq!(o.len(), brute_period(&t.matrix, a, b, q));
        for w in o.windows(2) {
            prop_assert_eq!(&w[0].apply(&t.matrix), &w[1]);
        }
    }

    #[test]
    fn inverse_undoes_map(x in -50i64..50, y in -50i64..50) {
        let t = common::cat();
        let p = (TowerExt::from_rational(rat(x, 7)), TowerExt::sqrt(3) * TowerExt::from_rational(rat(y, 5)));
        prop_assert_eq!(t.apply_inverse(&t.apply(&p)), p);
    }
}
