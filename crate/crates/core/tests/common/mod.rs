//! Shared fixtures and the 300-bit interval oracle.
#![allow(dead_code)]

pub mod instances;
pub mod oracle;

use toral_core::automorphism::{RationalPoint, ToralAuto};
use toral_core::boxconstruct::{build_box, BoxB, BoxPrimeSpec, ConstructionCertificate};
use toral_core::numbers::rat;

pub fn cat() -> ToralAuto {
    ToralAuto::analyze([[2, 1], [1, 1]]).unwrap()
}

pub fn s_map() -> ToralAuto {
    ToralAuto::analyze([[1, 1], [1, 2]]).unwrap()
}

pub fn cat_spec() -> BoxPrimeSpec {
    BoxPrimeSpec::new(rat(1, 10), rat(1, 10), RationalPoint::new(rat(1, 5), rat(2, 5))).unwrap()
}

pub fn cat_box() -> (BoxB, ConstructionCertificate) {
    build_box(&cat_spec(), &cat(), &rat(1, 20)).unwrap()
}
