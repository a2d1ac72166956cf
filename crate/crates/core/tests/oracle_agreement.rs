mod common;

use common::oracle::{agreement, isqrt, Iv};
use num_bigint::BigInt;

#[test]
fn newton_sqrt_brackets() {
    for n in [0u64, 1, 2, 5, 99, 1 << 40] {
        let s = isqrt(&BigInt::from(n));
        assert!(&s * &s <= BigInt::from(n) && (&s + 1) * (&s + 1) > BigInt::from(n));
    }
    let r5 = Iv::sqrt(5);
    assert!((r5.to_f64() - 5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn kernels_agree_with_oracle() {
    let a = agreement(0x5eed, 300);
    assert!(a.disagreements.is_empty(), "{:?}", a.disagreements);
    assert!(a.conclusive * 2 > a.instances, "only {} of {} conclusive", a.conclusive, a.instances);
}
