use alloc::vec::Vec;

use crate::geometry::{Direction, PointSet2D, ScalarSet};

/// `pi_e(P) = { x e1 + y e2 }`. Values equal as floats collapse to one.
pub fn project(set: &PointSet2D, e: &Direction) -> ScalarSet {
    ScalarSet::from_values(set.iter().map(|p| e.project(p)).collect())
        .expect("projections of finite points are finite")
}

/// `pi_t(P) = { x + t y }`.
pub fn project_param(set: &PointSet2D, t: f64) -> ScalarSet {
    ScalarSet::from_values(set.iter().map(|p| p.x + t * p.y).collect())
        .expect("projections of finite points are finite")
}

/// One projected value per point, sorted; repeats are kept.
pub fn projected_values(set: &PointSet2D, e: &Direction) -> Vec<f64> {
    let mut v: Vec<f64> = set.iter().map(|p| e.project(p)).collect();
    v.sort_by(f64::total_cmp);
    v
}
