//! Non-concentration checks for `(delta, t)`-sets.
//!
//! A ball at scale `r` is the closed ball of *diameter* `r` (radius `r/2`)
//! around a point of the set. Scales run through the dyadic ladder
//! `delta, 2 delta, ..., 1`; restricting to dyadic scales changes the
//! supremum over all `r` in `[delta, 1]` by at most a factor `2^t`.

use alloc::format;
use alloc::string::String;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, PointSet2D, ScalarSet};
use crate::scale::Scale;

/// Outcome of a `(delta, t)` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonConcentrationReport {
    pub exponent: f64,
    pub delta: f64,
    /// `max |P ∩ B(x, r)| / (r / delta)^t` over centers in `P` and dyadic `r`.
    pub worst_ratio: f64,
    pub witness_center: Option<Point>,
    pub witness_radius: f64,
    pub witness_count: usize,
    /// Power of `log(1/delta)` already divided out of `worst_ratio` (always 0: ratios are raw).
    pub log_power_used: f64,
}

/// Acceptance bound `constant * ln(1/delta)^log_power` for worst ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub constant: f64,
    pub log_power: f64,
}

impl Threshold {
    pub const fn flat(constant: f64) -> Self {
        Threshold {
            constant,
            log_power: 0.0,
        }
    }

    pub fn bound(&self, delta: Scale) -> f64 {
        self.constant * libm::pow(delta.log_inv(), self.log_power)
    }
}

impl NonConcentrationReport {
    pub fn within(&self, threshold: Threshold, delta: Scale) -> bool {
        self.worst_ratio <= threshold.bound(delta)
    }

    /// Turns a failed comparison into an error naming the witness ball.
    pub fn require(&self, threshold: Threshold, delta: Scale, what: &str) -> Result<()> {
        if self.within(threshold, delta) {
            return Ok(());
        }
        let c = self.witness_center.unwrap_or(Point::new(f64::NAN, f64::NAN));
        Err(Error::NonConcentration {
            what: String::from(what),
            ratio: self.worst_ratio,
            threshold: threshold.bound(delta),
            cx: c.x,
            cy: c.y,
            radius: self.witness_radius,
        })
    }
}

/// Sets on which ball counts around member points can be evaluated.
pub trait BallCount {
    fn size(&self) -> usize;
    fn center(&self, i: usize) -> Point;
    /// `|{q : |q - member_i| <= radius}|` (closed ball, counts the member itself).
    fn count_within(&self, i: usize, radius: f64) -> usize;
    fn verify_separated(&self, r: f64) -> Result<()>;
}

impl BallCount for ScalarSet {
    fn size(&self) -> usize {
        self.len()
    }

    fn center(&self, i: usize) -> Point {
        Point::new(self.values()[i], 0.0)
    }

    fn count_within(&self, i: usize, radius: f64) -> usize {
        let v = self.values();
        let c = v[i];
        let lo = v.partition_point(|&x| c - x > radius);
        let hi = v.partition_point(|&x| x - c <= radius);
        hi - lo
    }

    fn verify_separated(&self, r: f64) -> Result<()> {
        self.check_separated(r)
    }
}

impl BallCount for PointSet2D {
    fn size(&self) -> usize {
        self.len()
    }

    fn center(&self, i: usize) -> Point {
        self.points()[i]
    }

    fn count_within(&self, i: usize, radius: f64) -> usize {
        // Points are sorted by x first, so the x-strip is a contiguous slice.
        let pts = self.points();
        let c = pts[i];
        let lo = pts.partition_point(|p| c.x - p.x > radius);
        let hi = pts.partition_point(|p| p.x - c.x <= radius);
        pts[lo..hi].iter().filter(|p| p.dist(&c) <= radius).count()
    }

    fn verify_separated(&self, r: f64) -> Result<()> {
        self.check_separated(r)
    }
}

/// Scans all centers in `set` and all dyadic scales for the worst ratio
/// `|P ∩ B(x, r)| / (r / delta)^t`.
///
/// Fails with [`Error::SeparationViolation`] if `set` is not `delta`-separated.
pub fn check_delta_t<S: BallCount + ?Sized>(
    set: &S,
    delta: Scale,
    t: f64,
) -> Result<NonConcentrationReport> {
    if !(t > 0.0 && t <= 2.0) {
        return Err(invalid("t", format!("{t} is not in (0, 2]")));
    }
    set.verify_separated(delta.value())?;
    Ok(scan(set, delta, t))
}

/// Same scan without the separation precondition.
pub fn scan<S: BallCount + ?Sized>(set: &S, delta: Scale, t: f64) -> NonConcentrationReport {
    let mut report = NonConcentrationReport {
        exponent: t,
        delta: delta.value(),
        worst_ratio: 0.0,
        witness_center: None,
        witness_radius: delta.value(),
        witness_count: 0,
        log_power_used: 0.0,
    };
    let n = set.size();
    for r in delta.dyadic_radii() {
        let denom = libm::pow(r / delta.value(), t);
        // A ball can hold at most n points; skip scales that cannot improve.
        if (n as f64) / denom <= report.worst_ratio {
            continue;
        }
        for i in 0..n {
            let count = set.count_within(i, r / 2.0);
            let ratio = count as f64 / denom;
            if ratio > report.worst_ratio {
                report.worst_ratio = ratio;
                report.witness_center = Some(set.center(i));
                report.witness_radius = r;
                report.witness_count = count;
            }
        }
    }
    report
}
