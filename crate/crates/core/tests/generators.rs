mod common;

use projlab_core::covering::covering_number;
use projlab_core::generators::{
    gen_cantor_1d, gen_four_corner, gen_planted_collinear, gen_random_frostman, gen_random_frostman_1d,
    Generated, GeneratorKind, GeneratorSpec, PlantedLines,
};
use projlab_core::nonconc::check_delta_t;
use projlab_core::{Point, Scale};
use std::collections::BTreeMap;

#[test]
fn four_corner_is_cantor_squared() {
    for depth in 0..5 {
        let c = gen_cantor_1d(0.25, depth).unwrap();
        let k = gen_four_corner(depth).unwrap();
        let mut expect: Vec<Point> = c.iter().flat_map(|x| c.iter().map(move |y| Point::new(x, y))).collect();
        expect.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let mut got = k.points().to_vec();
        got.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        assert_eq!(got, expect);
        assert_eq!(k.len(), 1 << (2 * depth));
    }
}

#[test]
fn cantor_counts_and_dimension() {
    // Contraction 1/4: one point per surviving interval of length 4^-depth.
    let c = gen_cantor_1d(0.25, 5).unwrap();
    assert_eq!(c.len(), 32);
    let d = Scale::dyadic(10).unwrap();
    assert_eq!(covering_number(&c, d), 32);
    assert!(check_delta_t(&c, d, 0.5).unwrap().worst_ratio <= 2.0);
}

fn dyadic_cell_counts(pts: &[Point], delta: f64) -> f64 {
    // Largest count / (side/delta)^1 over dyadic cells.
    let mut worst: f64 = 0.0;
    let mut side = 1.0;
    while side >= delta {
        let mut count: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for p in pts {
            *count.entry(((p.x / side).floor() as i64, (p.y / side).floor() as i64)).or_default() += 1;
        }
        for &c in count.values() {
            worst = worst.max(c as f64 / (side / delta));
        }
        side /= 2.0;
    }
    worst
}

#[test]
fn random_frostman_respects_cell_caps() {
    let d = Scale::dyadic(8).unwrap();
    for seed in 0..10 {
        let p = gen_random_frostman(256, 1.0, d, seed).unwrap();
        assert_eq!(p.len(), 256);
        assert!(dyadic_cell_counts(p.points(), d.value()) <= 1.0);
        for q in p.iter() {
            assert_eq!((q.x / d.value()).fract(), 0.0);
            assert_eq!((q.y / d.value()).fract(), 0.0);
            assert!(q.x < 1.0 && q.y < 1.0);
        }
    }
}

#[test]
fn random_frostman_is_reproducible() {
    let d = Scale::dyadic(8).unwrap();
    let a = gen_random_frostman(100, 1.3, d, 42).unwrap();
    let b = gen_random_frostman(100, 1.3, d, 42).unwrap();
    let c = gen_random_frostman(100, 1.3, d, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let first: Vec<(f64, f64)> = a.iter().take(3).map(|p| (p.x, p.y)).collect();
    assert_eq!(first, FROZEN_FIRST_POINTS.to_vec());
}

const FROZEN_FIRST_POINTS: [(f64, f64); 3] = [(0.0, 0.44921875), (0.00390625, 0.734375), (0.0078125, 0.71875)];

#[test]
fn random_frostman_rejects_infeasible_requests() {
    let d = Scale::dyadic(4).unwrap();
    assert!(gen_random_frostman(17, 1.0, d, 0).is_err());
    assert!(gen_random_frostman(16, 1.0, d, 0).is_ok());
    assert!(gen_random_frostman(10, 1.0, Scale::new(0.1).unwrap(), 0).is_err());
    assert!(gen_random_frostman_1d(5, 0.5, d, 0).is_err());
    let s = gen_random_frostman_1d(4, 0.5, d, 0).unwrap();
    assert_eq!(s.len(), 4);
}

#[test]
fn planted_lines_sit_on_lines() {
    let d = Scale::dyadic(8).unwrap();
    let base = projlab_core::generators::gen_ap(5, 0.2, 0.1).unwrap();
    let lines = PlantedLines { slope: 0.5, intercept: 0.1, spacing: 0.05, lines: 6, jitter: d.value() / 2.0 };
    let set = gen_planted_collinear(&base, lines, d, 0.5, 0.5, 3).unwrap();
    for (i, b) in base.iter().enumerate() {
        let f = set.fiber(i);
        assert_eq!(f.len(), 6);
        for (k, a) in f.iter().enumerate() {
            let ideal = 0.1 + k as f64 * 0.05 + 0.5 * (b - 0.1);
            assert!((a - ideal).abs() <= d.value() / 2.0);
        }
    }
    let again = gen_planted_collinear(&base, lines, d, 0.5, 0.5, 3).unwrap();
    assert_eq!(set, again);
    let bad = PlantedLines { jitter: d.value(), ..lines };
    assert!(gen_planted_collinear(&base, bad, d, 0.5, 0.5, 3).is_err());
}

#[test]
fn spec_text_round_trips() {
    let spec = GeneratorSpec::new(GeneratorKind::RandomFrostman, 7)
        .with("n", 64)
        .with("exponent", 1)
        .with("delta", 0.00390625);
    let text = spec.to_text();
    assert_eq!(text, "kind=random_frostman\nseed=7\ndelta=0.00390625\nexponent=1\nn=64\n");
    assert_eq!(GeneratorSpec::parse(&text).unwrap(), spec);
    let Generated::Points(p) = spec.run().unwrap() else { panic!("points expected") };
    assert_eq!(p, gen_random_frostman(64, 1.0, Scale::dyadic(8).unwrap(), 7).unwrap());
}

#[test]
fn spec_errors_name_the_line() {
    let err = GeneratorSpec::parse("kind=ap\nseed=x\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    assert!(GeneratorSpec::parse("kind=nope").is_err());
    assert!(GeneratorSpec::parse("seed=1").is_err());
    let missing = GeneratorSpec::new(GeneratorKind::Ap, 0).with("n", 3);
    assert!(missing.run().is_err());
}

#[test]
fn every_kind_runs() {
    let specs = [
        GeneratorSpec::new(GeneratorKind::Ap, 0).with("n", 4).with("step", 0.25),
        GeneratorSpec::new(GeneratorKind::Cantor1d, 0).with("contraction", 0.25).with("depth", 3),
        GeneratorSpec::new(GeneratorKind::FourCorner, 0).with("depth", 2),
        GeneratorSpec::new(GeneratorKind::RandomFrostman, 1).with("n", 16).with("exponent", 1).with("delta", 0.0625),
        GeneratorSpec::new(GeneratorKind::Product, 0)
            .with("delta", 0.0625)
            .with("base_n", 4)
            .with("base_step", 0.25)
            .with("fiber_n", 4)
            .with("fiber_step", 0.25),
        GeneratorSpec::new(GeneratorKind::PlantedCollinear, 2)
            .with("delta", 0.0625)
            .with("base_n", 3)
            .with("base_step", 0.25)
            .with("lines", 2)
            .with("slope", 0.5),
    ];
    let sizes: Vec<usize> = specs
        .iter()
        .map(|s| match s.run().unwrap() {
            Generated::Scalars(v) => v.len(),
            Generated::Points(p) => p.len(),
            Generated::Product(p) => p.len(),
        })
        .collect();
    assert_eq!(sizes, vec![4, 8, 16, 16, 16, 6]);
    for s in &specs {
        assert_eq!(GeneratorKind::parse(s.kind.name()).unwrap(), s.kind);
    }
}
