#![allow(dead_code)]

use projlab_core::{Direction, Point, PointSet2D, ScalarSet, Scale};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(n: usize, seed: u64) -> PointSet2D {
    let mut r = rng(seed);
    PointSet2D::new((0..n).map(|_| Point::new(r.random::<f64>(), r.random::<f64>())).collect()).unwrap()
}

pub fn random_scalars(n: usize, seed: u64) -> ScalarSet {
    let mut r = rng(seed);
    ScalarSet::from_values((0..n).map(|_| r.random::<f64>()).collect()).unwrap()
}

/// Random grid points `k * delta` in `[0, 1]^2`, hence `delta`-separated.
pub fn random_grid_points(n: usize, delta: Scale, seed: u64) -> PointSet2D {
    let mut r = rng(seed);
    let m = (1.0 / delta.value()) as i64;
    PointSet2D::new(
        (0..n)
            .map(|_| {
                Point::new(
                    r.random_range(0..=m) as f64 * delta.value(),
                    r.random_range(0..=m) as f64 * delta.value(),
                )
            })
            .collect(),
    )
    .unwrap()
}

/// O(n^2) ordered close-pair count.
pub fn brute_close_pairs(p: &PointSet2D, e: &Direction, delta: f64) -> u64 {
    let v: Vec<f64> = p.iter().map(|q| e.project(q)).collect();
    let mut c = 0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i != j && (v[i] - v[j]).abs() <= delta {
                c += 1;
            }
        }
    }
    c
}

/// Brute-force worst ratio: every centre, every dyadic diameter, full scan.
pub fn brute_worst_ratio(pts: &[Point], delta: f64, t: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut r = delta;
    while r <= 1.0 + 1e-12 {
        for c in pts {
            let n = pts.iter().filter(|q| q.dist(c) <= r / 2.0).count();
            worst = worst.max(n as f64 / (r / delta).powf(t));
        }
        r *= 2.0;
    }
    worst
}

/// Closed-interval greedy cover, written independently of the library.
pub fn brute_interval_cover(sorted: &[f64], delta: f64) -> usize {
    let mut count = 0;
    let mut i = 0;
    while i < sorted.len() {
        count += 1;
        let start = sorted[i];
        while i < sorted.len() && sorted[i] - start <= delta {
            i += 1;
        }
    }
    count
}
