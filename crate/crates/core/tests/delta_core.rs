mod common;

use common::*;
use projlab_core::covering::{covering_number, covering_number_2d, optimal_interval_cover};
use projlab_core::extract::{dyadic_content, extract_delta_s_subset, extraction_ratio_bound};
use projlab_core::nonconc::{check_delta_t, Threshold};
use projlab_core::{Point, PointSet2D, ScalarSet, Scale};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn grid_count_sandwiches_interval_cover() {
    let mut r = rng(2024);
    for seed in 0..100 {
        let n = r.random_range(1..=500);
        let set = random_scalars(n, seed);
        let delta = Scale::new(r.random_range(0.001..0.2)).unwrap();
        let grid = covering_number(&set, delta);
        let cover = brute_interval_cover(set.values(), delta.value());
        assert_eq!(optimal_interval_cover(&set, delta), cover);
        assert!(cover <= grid && grid <= 2 * cover, "seed {seed}: {cover} vs {grid}");
    }
}

#[test]
fn ball_scan_matches_brute_force() {
    for seed in 0..20 {
        let d = Scale::dyadic(5).unwrap();
        let p = random_grid_points(60, d, seed);
        for t in [0.5, 1.0, 1.5] {
            let rep = check_delta_t(&p, d, t).unwrap();
            let brute = brute_worst_ratio(p.points(), d.value(), t);
            assert!((rep.worst_ratio - brute).abs() <= 1e-12 * brute, "{seed} {t}");
        }
    }
}

#[test]
fn ball_scan_on_scalars_matches_brute_force() {
    let d = Scale::dyadic(7).unwrap();
    for seed in 0..20 {
        let mut r = rng(seed);
        let vals: Vec<f64> = (0..40).map(|_| r.random_range(0..=128) as f64 * d.value()).collect();
        let s = ScalarSet::from_values(vals).unwrap();
        let pts: Vec<Point> = s.iter().map(|v| Point::new(v, 0.0)).collect();
        let rep = check_delta_t(&s, d, 0.7).unwrap();
        let brute = brute_worst_ratio(&pts, d.value(), 0.7);
        assert!((rep.worst_ratio - brute).abs() <= 1e-12 * brute);
    }
}

#[test]
fn threshold_failure_names_witness() {
    let d = Scale::dyadic(6).unwrap();
    let s = ScalarSet::from_values((0..32).map(|k| k as f64 * d.value()).collect()).unwrap();
    let rep = check_delta_t(&s, d, 0.5).unwrap();
    let err = rep.require(Threshold::flat(2.0), d, "progression").unwrap_err();
    assert!(err.to_string().contains("progression"));
    assert!(rep.require(Threshold::flat(rep.worst_ratio), d, "progression").is_ok());
}

fn full_grid(j: u32) -> PointSet2D {
    let n = (1usize << j) + 1;
    let step = 1.0 / (1u64 << j) as f64;
    PointSet2D::new(
        (0..n)
            .flat_map(|a| (0..n).map(move |b| Point::new(a as f64 * step, b as f64 * step)))
            .collect(),
    )
    .unwrap()
}

#[test]
fn extraction_from_full_grid() {
    let d = Scale::dyadic(6).unwrap();
    let k = full_grid(6);
    let out = extract_delta_s_subset(&k, 1.0, d, 1.0).unwrap();
    // Min-cut by hand: the unit cell keeps 64, the column x = 1 and the row
    // y = 1 keep 64 each (a line meets at most 2^(6-j) grid points per
    // level-j cell), and the corner (1, 1) keeps 1.
    assert_eq!(out.points.len(), 193);
    let rep = check_delta_t(&out.points, d, 1.0).unwrap();
    assert!(rep.worst_ratio <= extraction_ratio_bound(d, 1.0));
    assert!(out.points.len() as f64 >= out.guaranteed_size);
    assert!((dyadic_content(&k, d, 1.0) - out.dyadic_content).abs() < 1e-12);
}

#[test]
fn extraction_from_line_degrades() {
    let d = Scale::dyadic(6).unwrap();
    let line = PointSet2D::new((0..=64).map(|k| Point::new(k as f64 * d.value(), 0.5)).collect()).unwrap();
    let out = extract_delta_s_subset(&line, 1.0, d, 2.0).unwrap();
    assert_eq!(out.points.len(), 65);
    assert!((out.points.len() as f64) < 0.02 * d.value().powi(-2));
}

#[test]
fn extraction_respects_bound_on_random_sets() {
    for seed in 0..10 {
        let d = Scale::dyadic(6).unwrap();
        let k = random_points(3000, seed);
        for s in [0.5, 1.0, 1.5] {
            let out = extract_delta_s_subset(&k, 1.0, d, s).unwrap();
            let rep = check_delta_t(&out.points, d, s).unwrap();
            assert!(rep.worst_ratio <= extraction_ratio_bound(d, s), "{seed} {s}: {}", rep.worst_ratio);
            assert!(out.points.len() as f64 >= out.guaranteed_size - 1e-9);
        }
    }
}

#[test]
fn extraction_bound_for_non_dyadic_scale() {
    let d = Scale::new(0.03).unwrap();
    let k = random_points(4000, 5);
    let out = extract_delta_s_subset(&k, 1.0, d, 1.0).unwrap();
    let rep = check_delta_t(&out.points, d, 1.0).unwrap();
    assert!(rep.worst_ratio <= extraction_ratio_bound(d, 1.0));
}

#[test]
fn grid_count_2d_matches_cell_set() {
    let d = Scale::new(0.07).unwrap();
    let p = random_points(400, 8);
    let mut cells: Vec<(i64, i64)> = p
        .iter()
        .map(|q| ((q.x / 0.07).floor() as i64, (q.y / 0.07).floor() as i64))
        .collect();
    cells.sort();
    cells.dedup();
    assert_eq!(covering_number_2d(&p, d), cells.len());
}

proptest! {
    #[test]
    fn snap_is_floor_on_grid(k in -10_000i64..10_000, frac in 0.0f64..0.999) {
        let d = Scale::dyadic(7).unwrap();
        let x = (k as f64 + frac) * d.value();
        prop_assert_eq!(d.cell(x), k);
        prop_assert_eq!(d.cell(k as f64 * d.value()), k);
    }

    #[test]
    fn sandwich_holds(vals in prop::collection::vec(0.0f64..1.0, 1..200), delta in 0.001f64..0.5) {
        let s = ScalarSet::from_values(vals).unwrap();
        let d = Scale::new(delta).unwrap();
        let g = covering_number(&s, d);
        let c = optimal_interval_cover(&s, d);
        prop_assert!(c <= g && g <= 2 * c);
    }
}
