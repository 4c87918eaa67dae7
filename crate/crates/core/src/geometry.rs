//! Point sets, scalar sets and directions.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};

/// Relative slack allowed when testing `|p - q| >= r` in floating point.
pub const SEPARATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

fn canonical_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// A finite set of reals in an ambient interval, kept strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSet {
    values: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl ScalarSet {
    /// Sorts and deduplicates `values`; every value must lie in `[lo, hi]`.
    pub fn new(values: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(invalid("interval", alloc::format!("[{lo}, {hi}] is empty")));
        }
        let mut values = values;
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(invalid("values", "non-finite value"));
            }
            if *v < lo || *v > hi {
                return Err(invalid(
                    "values",
                    alloc::format!("{v} outside ambient interval [{lo}, {hi}]"),
                ));
            }
            *v = canonical_zero(*v);
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(ScalarSet { values, lo, hi })
    }

    /// Ambient interval taken as the hull of the values.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let (lo, hi) = hull(&values);
        ScalarSet::new(values, lo, hi)
    }

    pub fn empty() -> Self {
        ScalarSet {
            values: Vec::new(),
            lo: 0.0,
            hi: 0.0,
        }
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ambient(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }

    /// `max - min`, zero for fewer than two values.
    pub fn width(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Multiplies every value (and the ambient interval) by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<ScalarSet> {
        if !(factor > 0.0) {
            return Err(invalid("factor", "must be positive"));
        }
        ScalarSet::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.lo * factor,
            self.hi * factor,
        )
    }

    /// First adjacent pair closer than `r` (with slack), if any.
    pub fn separation_violation(&self, r: f64) -> Option<(usize, usize, f64)> {
        let need = r * (1.0 - SEPARATION_SLACK);
        self.values
            .windows(2)
            .enumerate()
            .find(|(_, w)| w[1] - w[0] < need)
            .map(|(i, w)| (i, i + 1, w[1] - w[0]))
    }

    pub fn check_separated(&self, r: f64) -> Result<()> {
        match self.separation_violation(r) {
            None => Ok(()),
            Some((first, second, distance)) => Err(Error::SeparationViolation {
                first,
                second,
                distance,
                required: r,
            }),
        }
    }
}

fn hull(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// A finite planar point set, stored in lexicographic order without duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet2D {
    points: Vec<Point>,
    separation: Option<f64>,
}

impl PointSet2D {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let mut points = points;
        for p in points.iter_mut() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(invalid("points", "non-finite coordinate"));
            }
            p.x = canonical_zero(p.x);
            p.y = canonical_zero(p.y);
        }
        points.sort_by(Point::lex_cmp);
        points.dedup();
        Ok(PointSet2D {
            points,
            separation: None,
        })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self> {
        PointSet2D::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn empty() -> Self {
        PointSet2D {
            points: Vec::new(),
            separation: None,
        }
    }

    /// Declares (and verifies) that distinct points are at least `r` apart.
    pub fn with_separation(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(invalid("separation", "must be positive"));
        }
        self.check_separated(r)?;
        self.separation = Some(r);
        Ok(self)
    }

    #[inline]
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn separation(&self) -> Option<f64> {
        self.separation
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> + '_ {
        self.points.iter()
    }

    /// First pair of points closer than `r` (with slack), found by bucketing
    /// into an `r`-grid and scanning the 3x3 neighbourhood of every cell.
    pub fn separation_violation(&self, r: f64) -> Option<(usize, usize, f64)> {
        let need = r * (1.0 - SEPARATION_SLACK);
        let mut buckets: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for (i, p) in self.points.iter().enumerate() {
            let key = (
                libm::floor(p.x / r) as i64,
                libm::floor(p.y / r) as i64,
            );
            buckets.entry(key).or_default().push(i);
        }
        let mut worst: Option<(usize, usize, f64)> = None;
        for (&(cx, cy), members) in buckets.iter() {
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(other) = buckets.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &i in members {
                        for &j in other {
                            if j <= i {
                                continue;
                            }
                            let d = self.points[i].dist(&self.points[j]);
                            if d < need {
                                let better = match worst {
                                    None => true,
                                    Some((a, b, _)) => (i, j) < (a, b),
                                };
                                if better {
                                    worst = Some((i, j, d));
                                }
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn check_separated(&self, r: f64) -> Result<()> {
        match self.separation_violation(r) {
            None => Ok(()),
            Some((first, second, distance)) => Err(Error::SeparationViolation {
                first,
                second,
                distance,
                required: r,
            }),
        }
    }

    /// Points lying in the half-open square `[x0, x0+side) x [y0, y0+side)`.
    pub fn in_square(&self, x0: f64, y0: f64, side: f64) -> Vec<Point> {
        self.points
            .iter()
            .filter(|p| p.x >= x0 && p.x < x0 + side && p.y >= y0 && p.y < y0 + side)
            .copied()
            .collect()
    }

    pub fn x_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
}

/// A unit direction `e = (cos theta, sin theta)`, `theta` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    e: (f64, f64),
}

fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t < 0.0 {
        t += TAU;
    }
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl Direction {
    pub fn from_angle(theta: f64) -> Self {
        let theta = wrap_angle(theta);
        let (s, c) = libm::sincos(theta);
        Direction { theta, e: (c, s) }
    }

    /// Normalizes `(x, y)`; unit inputs such as `(0, 1)` are kept bit-exact.
    pub fn from_vector(x: f64, y: f64) -> Result<Self> {
        let n = libm::hypot(x, y);
        if !(n > 0.0) || !n.is_finite() {
            return Err(invalid("direction", "zero or non-finite vector"));
        }
        let e = if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            (x, y)
        } else {
            (x / n, y / n)
        };
        Ok(Direction {
            theta: wrap_angle(libm::atan2(e.1, e.0)),
            e,
        })
    }

    /// `e = (1, 0)`: projection onto the x-axis.
    pub fn horizontal() -> Self {
        Direction {
            theta: 0.0,
            e: (1.0, 0.0),
        }
    }

    /// `e = (0, 1)`: projection onto the y-axis.
    pub fn vertical() -> Self {
        Direction {
            theta: PI / 2.0,
            e: (0.0, 1.0),
        }
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn vector(&self) -> (f64, f64) {
        self.e
    }

    /// `pi_e(p) = p . e`
    #[inline]
    pub fn project(&self, p: &Point) -> f64 {
        p.x * self.e.0 + p.y * self.e.1
    }

    /// Arc distance on the unit circle.
    pub fn angular_distance(&self, other: &Direction) -> f64 {
        circular_gap(self.theta, other.theta)
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % TAU;
    d.min(TAU - d)
}

/// An indexed collection of directions. Index order is preserved: it is the
/// tie-breaking order of every sweep.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirectionSet {
    directions: Vec<Direction>,
}

impl DirectionSet {
    pub fn new(directions: Vec<Direction>) -> Self {
        DirectionSet { directions }
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        DirectionSet::new(angles.iter().map(|&t| Direction::from_angle(t)).collect())
    }

    /// `n` directions `k pi / n`, `k = 0..n`, anchored at angle 0.
    ///
    /// Half a circle suffices: `pi_{-e}` is `pi_e` reflected.
    pub fn half_circle_net(n: usize) -> Self {
        let mut dirs: Vec<Direction> = (0..n)
            .map(|k| Direction::from_angle(PI * k as f64 / n as f64))
            .collect();
        if let Some(first) = dirs.first_mut() {
            *first = Direction::horizontal();
        }
        DirectionSet::new(dirs)
    }

    /// `n` directions `k delta`, `k = 0..n`: a `delta`-spaced net anchored at
    /// angle 0. For `n < pi / delta` it covers only the arc `[0, (n - 1) delta]`.
    pub fn delta_net(delta: f64, n: usize) -> Self {
        let mut dirs: Vec<Direction> = (0..n)
            .map(|k| Direction::from_angle(k as f64 * delta))
            .collect();
        if let Some(first) = dirs.first_mut() {
            *first = Direction::horizontal();
        }
        DirectionSet::new(dirs)
    }

    /// `n` directions spread uniformly over `[center - half_width, center + half_width]`.
    pub fn arc_net(center: f64, half_width: f64, n: usize) -> Self {
        let dirs = match n {
            0 => Vec::new(),
            1 => alloc::vec![Direction::from_angle(center)],
            _ => (0..n)
                .map(|k| {
                    let t = -half_width + 2.0 * half_width * k as f64 / (n - 1) as f64;
                    Direction::from_angle(center + t)
                })
                .collect(),
        };
        DirectionSet::new(dirs)
    }

    #[inline]
    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Direction> + '_ {
        self.directions.iter()
    }

    pub fn get(&self, index: usize) -> Option<&Direction> {
        self.directions.get(index)
    }

    pub fn contains_horizontal(&self) -> bool {
        self.directions
            .iter()
            .any(|d| d.vector() == (1.0, 0.0) || d.vector() == (-1.0, 0.0))
    }

    /// Minimal arc gap between distinct directions, with the offending pair.
    pub fn min_gap(&self) -> Option<(usize, usize, f64)> {
        let mut order: Vec<usize> = (0..self.directions.len()).collect();
        order.sort_by(|&a, &b| {
            self.directions[a]
                .theta
                .total_cmp(&self.directions[b].theta)
                .then(a.cmp(&b))
        });
        if order.len() < 2 {
            return None;
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for k in 0..order.len() {
            let (a, b) = (order[k], order[(k + 1) % order.len()]);
            let gap = self.directions[a].angular_distance(&self.directions[b]);
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if best.is_none_or(|(_, _, g)| gap < g) {
                best = Some((i, j, gap));
            }
        }
        best
    }

    /// Rejects sets with two directions closer than `r` in arc length.
    pub fn check_separated(&self, r: f64) -> Result<()> {
        match self.min_gap() {
            Some((first, second, distance)) if distance < r * (1.0 - SEPARATION_SLACK) => {
                Err(Error::SeparationViolation {
                    first,
                    second,
                    distance,
                    required: r,
                })
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_set_sorts_and_dedups() {
        let s = ScalarSet::new(alloc::vec![0.3, -0.0, 0.1, 0.3], -1.0, 1.0).unwrap();
        assert_eq!(s.values(), &[0.0, 0.1, 0.3]);
        assert!(ScalarSet::new(alloc::vec![2.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn separation_checks_name_the_pair() {
        let p = PointSet2D::from_xy(&[(0.0, 0.0), (0.5, 0.0), (0.5, 0.05)]).unwrap();
        match p.check_separated(0.1) {
            Err(Error::SeparationViolation { first, second, .. }) => {
                assert_eq!((first, second), (1, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(p.check_separated(0.04).is_ok());
    }

    #[test]
    fn grid_points_count_as_separated() {
        let delta = 0.1;
        let pts: Vec<(f64, f64)> = (0..11)
            .flat_map(|i| (0..11).map(move |j| (i as f64 * delta, j as f64 * delta)))
            .collect();
        let p = PointSet2D::from_xy(&pts).unwrap();
        assert!(p.check_separated(delta).is_ok());
    }

    #[test]
    fn unit_vectors_are_exact() {
        let v = Direction::from_vector(0.0, 1.0).unwrap();
        assert_eq!(v.vector(), (0.0, 1.0));
        assert_eq!(Direction::from_angle(0.0).vector(), (1.0, 0.0));
        let d = Direction::from_angle(1.234);
        let (c, s) = d.vector();
        assert!((c * c + s * s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn direction_net_gap() {
        let e = DirectionSet::half_circle_net(8);
        let (_, _, gap) = e.min_gap().unwrap();
        assert!((gap - PI / 8.0).abs() < 1e-12);
        assert!(e.check_separated(0.3).is_ok());
        assert!(e.check_separated(0.5).is_err());
        assert!(e.contains_horizontal());
    }
}
