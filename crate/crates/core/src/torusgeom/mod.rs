//! Exact geometry on the 2-torus with eigen-aligned edges.
//!
//! Everything is computed on lifts to the plane. A torus object is the image of
//! a plane object under the projection, and a lattice vector `k` names the lift.

mod frame;
mod lattice;
mod pgram;
mod segment;

pub use frame::{EigenFrame, LatticeHit};
pub(crate) use frame::PRUNE_PREC;
pub use lattice::lattice_candidates;
pub use pgram::{slice_through, EigenParallelogram, FaceFlags, Slice};
pub use segment::{
    line_pgram_intersect, segment_crossings, segment_pgram_intersect, Axis, Crossing, CrossingSolver,
    EigenSegment, TInterval,
};

use crate::numbers::Scalar;

/// A point of the plane (or a torus point given by any lift).
pub type Pt<K> = (K, K);

pub fn padd<K: Scalar>(a: &Pt<K>, b: &Pt<K>) -> Pt<K> {
    (a.0.clone() + b.0.clone(), a.1.clone() + b.1.clone())
}

pub fn psub<K: Scalar>(a: &Pt<K>, b: &Pt<K>) -> Pt<K> {
    (a.0.clone() - b.0.clone(), a.1.clone() - b.1.clone())
}

pub fn pscale<K: Scalar>(a: &Pt<K>, t: &K) -> Pt<K> {
    (a.0.clone() * t.clone(), a.1.clone() * t.clone())
}

pub fn plattice<K: Scalar>(a: &Pt<K>, k: (i64, i64)) -> Pt<K> {
    (a.0.clone() + K::from_int(k.0), a.1.clone() + K::from_int(k.1))
}

/// Canonical representative in `[0,1)²` (exact floor).
pub fn reduce<K: Scalar>(p: &Pt<K>) -> Pt<K> {
    crate::automorphism::reduce_mod1(p)
}

/// Torus equality: the two lifts differ by an integer vector.
pub fn torus_eq<K: Scalar>(a: &Pt<K>, b: &Pt<K>) -> bool {
    reduce(a) == reduce(b)
}
