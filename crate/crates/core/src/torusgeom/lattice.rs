use super::{psub, EigenParallelogram, LatticeHit, Pt};
use crate::numbers::EigenScalar;

/// Every `k ∈ Z²` for which the convex hull of `target + k` can meet `region`.
///
/// The target is bounded by its frame-coordinate box in the region's frame, so
/// the count grows linearly with the region's length rather than with the area
/// of its plane bounding box.
pub fn lattice_candidates<K: EigenScalar>(
    region: &EigenParallelogram<K>,
    target: &[Pt<K>],
) -> Vec<LatticeHit<K>> {
    assert!(!target.is_empty(), "empty target");
    let coords: Vec<(K, K)> = target.iter().map(|p| region.frame.to_frame(&psub(p, &region.anchor))).collect();
    let mut tu0 = coords[0].0.clone();
    let mut tu1 = tu0.clone();
    let mut tw0 = coords[0].1.clone();
    let mut tw1 = tw0.clone();
    for (u, w) in &coords[1..] {
        tu0 = K::min_of(tu0, u.clone());
        tu1 = K::max_of(tu1, u.clone());
        tw0 = K::min_of(tw0, w.clone());
        tw1 = K::max_of(tw1, w.clone());
    }
    region.frame.lattice_in_box(
        &(region.u.0.clone() - tu1),
        &(region.u.1.clone() - tu0),
        &(region.w.0.clone() - tw1),
        &(region.w.1.clone() - tw0),
    )
}
