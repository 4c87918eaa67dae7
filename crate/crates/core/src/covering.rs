//! Covering numbers `N(A, delta)`.
//!
//! The canonical count is the number of occupied half-open grid cells
//! `[k delta, (k+1) delta)` anchored at 0. A closed interval of length `delta`
//! meets at most two such cells, and every cell sits inside one such interval,
//! so in one dimension
//!
//! ```text
//! optimal_interval_cover(S) <= covering_number(S) <= 2 * optimal_interval_cover(S)
//! ```

use alloc::vec::Vec;

use crate::geometry::{PointSet2D, ScalarSet};
use crate::scale::{cell_index, Scale};

pub fn covering_number(set: &ScalarSet, delta: Scale) -> usize {
    count_sorted_cells(set.values(), delta.value())
}

/// Grid count for an arbitrary (unsorted, possibly repeating) slice of values.
pub fn covering_number_of_values(values: &[f64], delta: Scale) -> usize {
    let mut cells: Vec<i64> = values.iter().map(|&v| delta.cell(v)).collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

fn count_sorted_cells(sorted: &[f64], step: f64) -> usize {
    let mut count = 0;
    let mut last: Option<i64> = None;
    for &v in sorted {
        let k = cell_index(v, step);
        if last != Some(k) {
            count += 1;
            last = Some(k);
        }
    }
    count
}

/// Number of occupied `delta x delta` half-open grid squares.
pub fn covering_number_2d(set: &PointSet2D, delta: Scale) -> usize {
    let mut cells: Vec<(i64, i64)> = set
        .iter()
        .map(|p| (delta.cell(p.x), delta.cell(p.y)))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Minimal number of closed intervals of length `delta` covering `set`
/// (left-to-right greedy, exact in one dimension).
pub fn optimal_interval_cover(set: &ScalarSet, delta: Scale) -> usize {
    let step = delta.value();
    let mut count = 0;
    let mut start: Option<f64> = None;
    for v in set.iter() {
        match start {
            Some(s) if v - s <= step => {}
            _ => {
                count += 1;
                start = Some(v);
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn empty_set_has_zero_cover() {
        let d = Scale::new(0.1).unwrap();
        assert_eq!(covering_number(&ScalarSet::empty(), d), 0);
        assert_eq!(optimal_interval_cover(&ScalarSet::empty(), d), 0);
        assert_eq!(covering_number_2d(&PointSet2D::empty(), d), 0);
    }

    #[test]
    fn one_point_per_cell() {
        let d = Scale::new(0.1).unwrap();
        let s = ScalarSet::from_values((0..10).map(|k| k as f64 * 0.1).collect()).unwrap();
        assert_eq!(covering_number(&s, d), 10);
        let d = Scale::dyadic(3).unwrap();
        let s = ScalarSet::from_values((0..10).map(|k| k as f64 / 8.0).collect()).unwrap();
        assert_eq!(covering_number(&s, d), 10);
        // Neighbouring points are exactly delta apart: intervals of length delta
        // cover two at a time.
        assert_eq!(optimal_interval_cover(&s, d), 5);
    }

    #[test]
    fn single_point_2d() {
        let d = Scale::new(0.1).unwrap();
        let p = PointSet2D::new(alloc::vec![Point::new(0.0, 0.0)]).unwrap();
        assert_eq!(covering_number_2d(&p, d), 1);
    }

    #[test]
    fn full_grid_2d() {
        let d = Scale::dyadic(4).unwrap();
        let n = 17;
        let pts: Vec<Point> = (0..n)
            .flat_map(|i| (0..n).map(move |j| Point::new(i as f64 / 16.0, j as f64 / 16.0)))
            .collect();
        let p = PointSet2D::new(pts).unwrap();
        assert_eq!(covering_number_2d(&p, d), n * n);
    }

    #[test]
    fn values_variant_ignores_repeats() {
        let d = Scale::new(0.25).unwrap();
        assert_eq!(covering_number_of_values(&[0.9, 0.1, 0.1, 0.2, 0.6], d), 3);
    }
}
