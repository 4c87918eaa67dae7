//! Tubes, close projected pairs and the double-counting bounds behind the
//! projection lower bound for `(delta, 1)`-sets.
//!
//! Pairs are always *ordered*: `(p, q)` and `(q, p)` are both counted, and
//! `p = q` never is. A tube perpendicular to `e` is a half-open cell of the
//! `delta`-grid on the projected line, so tube membership agrees with
//! [`crate::covering::covering_number`] on the projection.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::covering::covering_number;
use crate::error::{Error, Result};
use crate::geometry::{Direction, DirectionSet, PointSet2D};
use crate::projection::{project, projected_values};
use crate::scale::{cell_index, Scale};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tube {
    pub direction: Direction,
    /// Grid index of the tube; `offset = index * width`.
    pub index: i64,
    pub offset: f64,
    pub width: f64,
}

impl Tube {
    pub fn contains(&self, p: &crate::geometry::Point) -> bool {
        cell_index(self.direction.project(p), self.width) == self.index
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeFamily<'a> {
    pub direction: Direction,
    pub tubes: Vec<Tube>,
    pub covered: &'a PointSet2D,
    /// `membership[i]` is the position in `tubes` of the tube holding point `i`.
    pub membership: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IncidenceTally {
    pub per_direction: BTreeMap<usize, u64>,
    pub total: u64,
}

impl IncidenceTally {
    pub fn record(&mut self, direction: usize, count: u64) {
        *self.per_direction.entry(direction).or_insert(0) += count;
        self.total += count;
    }
}

pub fn tube_cover<'a>(set: &'a PointSet2D, e: &Direction, delta: Scale) -> TubeFamily<'a> {
    let w = delta.value();
    let cells: Vec<i64> = set.iter().map(|p| cell_index(e.project(p), w)).collect();
    let mut distinct = cells.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let tubes = distinct
        .iter()
        .map(|&k| Tube {
            direction: *e,
            index: k,
            offset: k as f64 * w,
            width: w,
        })
        .collect();
    let membership = cells
        .iter()
        .map(|k| distinct.binary_search(k).expect("cell was collected"))
        .collect();
    TubeFamily {
        direction: *e,
        tubes,
        covered: set,
        membership,
    }
}

fn close_pairs_sorted(values: &[f64], delta: f64) -> u64 {
    let mut unordered = 0u64;
    let mut hi = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if hi < i + 1 {
            hi = i + 1;
        }
        while hi < values.len() && values[hi] - v <= delta {
            hi += 1;
        }
        unordered += (hi - i - 1) as u64;
    }
    2 * unordered
}

/// Ordered pairs `p != q` with `|pi_e(p) - pi_e(q)| <= delta` (sort and sweep).
pub fn close_pairs(set: &PointSet2D, e: &Direction, delta: Scale) -> u64 {
    close_pairs_sorted(&projected_values(set, e), delta.value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySchwarz {
    /// `|P|^2 / M - |P|` with `M = N(pi_e(P), delta)`.
    pub bound: f64,
    pub actual: u64,
    pub covering: usize,
}

pub fn cauchy_schwarz_lower_bound(set: &PointSet2D, e: &Direction, delta: Scale) -> CauchySchwarz {
    let values = projected_values(set, e);
    let actual = close_pairs_sorted(&values, delta.value());
    let n = set.len() as f64;
    let m = covering_number(&project(set, e), delta);
    let bound = if m == 0 { 0.0 } else { n * n / m as f64 - n };
    assert!(
        actual as f64 >= bound * (1.0 - 1e-12),
        "close pairs {actual} below the Cauchy-Schwarz bound {bound}"
    );
    CauchySchwarz {
        bound,
        actual,
        covering: m,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSum {
    pub tally: IncidenceTally,
    /// `Σ_e close_pairs(P, e, delta)`.
    pub lhs: u64,
    /// `delta^-2 * ln(1/delta)^2`.
    pub scale_factor: f64,
}

impl DirectionSum {
    /// Constant `C` with `lhs = C * delta^-2 * ln(1/delta)^2`.
    pub fn implied_constant(&self) -> f64 {
        self.lhs as f64 / self.scale_factor
    }

    pub fn rhs(&self, constant: f64) -> f64 {
        constant * self.scale_factor
    }

    pub fn holds(&self, constant: f64) -> bool {
        self.lhs as f64 <= self.rhs(constant)
    }
}

/// Sums close pairs over a `delta`-separated direction set.
pub fn direction_sum_upper_bound(
    set: &PointSet2D,
    directions: &DirectionSet,
    delta: Scale,
) -> Result<DirectionSum> {
    directions.check_separated(delta.value())?;
    let mut tally = IncidenceTally::default();
    for (i, e) in directions.iter().enumerate() {
        tally.record(i, close_pairs(set, e, delta));
    }
    let l = delta.log_inv();
    Ok(DirectionSum {
        lhs: tally.total,
        tally,
        scale_factor: l * l / (delta.value() * delta.value()),
    })
}

/// Most directions of any `delta`-separated subset of the circle along which
/// two points at distance `d` project within `delta` of each other.
///
/// The admissible directions form two antipodal arcs of length
/// `2 asin(min(1, delta/d))`; an arc of length `L` holds at most
/// `L/delta + 1` separated directions.
pub fn pair_direction_bound(d: f64, delta: Scale) -> f64 {
    let x = (delta.value() / d).min(1.0);
    4.0 * libm::asin(x) / delta.value() + 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaufmanWitness {
    pub index: usize,
    pub direction: Direction,
    pub covering: usize,
}

fn check_direction_count(directions: &DirectionSet, delta: Scale, s: f64) -> Result<()> {
    if directions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let need = libm::pow(delta.value(), -s);
    if (directions.len() as f64) < need * (1.0 - 1e-9) {
        return Err(Error::Hypothesis(format!(
            "{} directions, need at least delta^-s = {need:.3}",
            directions.len()
        )));
    }
    Ok(())
}

/// `N(pi_e(P), delta)` for every direction, in index order.
pub fn projection_profile(set: &PointSet2D, directions: &DirectionSet, delta: Scale) -> Vec<usize> {
    directions
        .iter()
        .map(|e| covering_number(&project(set, e), delta))
        .collect()
}

/// Direction of `E` maximising the projected covering number (lowest index on
/// ties). Stops early once a projection separates every point.
pub fn kaufman_witness(
    set: &PointSet2D,
    directions: &DirectionSet,
    delta: Scale,
    s: f64,
) -> Result<KaufmanWitness> {
    check_direction_count(directions, delta, s)?;
    let mut best = KaufmanWitness {
        index: 0,
        direction: directions.directions()[0],
        covering: 0,
    };
    for (i, e) in directions.iter().enumerate() {
        let n = covering_number(&project(set, e), delta);
        if n > best.covering || i == 0 {
            best = KaufmanWitness {
                index: i,
                direction: *e,
                covering: n,
            };
        }
        if best.covering == set.len() {
            break;
        }
    }
    Ok(best)
}

/// Same answer as [`kaufman_witness`] from a full sweep, no early exit.
pub fn kaufman_witness_exhaustive(
    set: &PointSet2D,
    directions: &DirectionSet,
    delta: Scale,
    s: f64,
) -> Result<KaufmanWitness> {
    check_direction_count(directions, delta, s)?;
    let profile = projection_profile(set, directions, delta);
    let mut index = 0;
    for (i, &n) in profile.iter().enumerate() {
        if n > profile[index] {
            index = i;
        }
    }
    Ok(KaufmanWitness {
        index,
        direction: directions.directions()[index],
        covering: profile[index],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub covering: usize,
    pub close_pairs: u64,
}

/// One row per direction: projected covering number and close-pair count.
pub fn projection_sweep(set: &PointSet2D, directions: &DirectionSet, delta: Scale) -> Vec<SweepRow> {
    directions
        .iter()
        .map(|e| SweepRow {
            theta: e.theta(),
            covering: covering_number(&project(set, e), delta),
            close_pairs: close_pairs(set, e, delta),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn brute(set: &PointSet2D, e: &Direction, delta: f64) -> u64 {
        let v: Vec<f64> = set.iter().map(|p| e.project(p)).collect();
        let mut c = 0;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j && libm::fabs(v[i] - v[j]) <= delta {
                    c += 1;
                }
            }
        }
        c
    }

    fn row(n: usize, d: f64) -> PointSet2D {
        PointSet2D::new((0..n).map(|k| Point::new(k as f64 * d, 0.0)).collect()).unwrap()
    }

    #[test]
    fn tube_counts() {
        let d = Scale::new(0.05).unwrap();
        let one = PointSet2D::from_xy(&[(0.2, 0.3)]).unwrap();
        assert_eq!(tube_cover(&one, &Direction::horizontal(), d).tubes.len(), 1);
        let p = row(10, d.value());
        assert_eq!(tube_cover(&p, &Direction::horizontal(), d).tubes.len(), 10);
        assert_eq!(tube_cover(&p, &Direction::vertical(), d).tubes.len(), 1);
    }

    #[test]
    fn every_point_in_its_tube() {
        let d = Scale::new(0.07).unwrap();
        let p = PointSet2D::from_xy(&[(0.1, 0.9), (0.33, 0.2), (0.5, 0.5), (0.8, 0.1)]).unwrap();
        let e = Direction::from_angle(0.7);
        let fam = tube_cover(&p, &e, d);
        for (i, q) in p.iter().enumerate() {
            let hits: Vec<usize> = (0..fam.tubes.len()).filter(|&t| fam.tubes[t].contains(q)).collect();
            assert_eq!(hits, alloc::vec![fam.membership[i]]);
        }
    }

    #[test]
    fn pair_examples() {
        let d = Scale::new(0.01).unwrap();
        let one = PointSet2D::from_xy(&[(0.2, 0.3)]).unwrap();
        assert_eq!(close_pairs(&one, &Direction::horizontal(), d), 0);
        let two = PointSet2D::from_xy(&[(0.0, 0.0), (0.0, 1.0)]).unwrap();
        assert_eq!(close_pairs(&two, &Direction::horizontal(), d), 2);
    }

    #[test]
    fn sweep_matches_brute_force() {
        let d = Scale::new(0.03).unwrap();
        let p = PointSet2D::from_xy(
            &(0..60)
                .map(|k| {
                    let k = k as f64;
                    (libm::fmod(k * 0.754_877_666, 1.0), libm::fmod(k * 0.569_840_291, 1.0))
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        for e in DirectionSet::half_circle_net(12).iter() {
            assert_eq!(close_pairs(&p, e, d), brute(&p, e, d.value()));
        }
    }

    #[test]
    fn one_tube_gives_complete_graph() {
        let d = Scale::new(0.5).unwrap();
        let p = PointSet2D::new((0..10).map(|k| Point::new(0.01, k as f64 * 0.1)).collect()).unwrap();
        let cs = cauchy_schwarz_lower_bound(&p, &Direction::horizontal(), d);
        assert_eq!(cs.covering, 1);
        assert_eq!(cs.bound, 90.0);
        assert_eq!(cs.actual, 90);
    }

    #[test]
    fn separated_projections_have_zero_bound() {
        let d = Scale::dyadic(4).unwrap();
        let p = row(8, 2.0 * d.value());
        let cs = cauchy_schwarz_lower_bound(&p, &Direction::horizontal(), d);
        assert_eq!(cs.bound, 0.0);
        assert_eq!(cs.actual, 0);
    }

    #[test]
    fn transverse_pair_has_no_incidences() {
        let d = Scale::dyadic(6).unwrap();
        let p = PointSet2D::from_xy(&[(0.0, 0.0), (0.9, 0.0)]).unwrap();
        let e = DirectionSet::new(alloc::vec![Direction::horizontal()]);
        assert_eq!(direction_sum_upper_bound(&p, &e, d).unwrap().lhs, 0);
    }

    #[test]
    fn clustered_directions_rejected() {
        let d = Scale::dyadic(3).unwrap();
        let p = PointSet2D::from_xy(&[(0.0, 0.0)]).unwrap();
        let e = DirectionSet::from_angles(&[0.0, 0.01]);
        assert!(direction_sum_upper_bound(&p, &e, d).is_err());
    }

    #[test]
    fn arc_bound_holds_on_nets() {
        let d = Scale::dyadic(6).unwrap();
        let n = libm::floor(core::f64::consts::PI / d.value()) as usize;
        let net = DirectionSet::half_circle_net(n);
        for dist in [0.02, 0.05, 0.1, 0.3, 0.7, 1.0] {
            let v = Point::new(dist * 0.6, dist * 0.8);
            let hits = net
                .iter()
                .filter(|e| libm::fabs(e.project(&v)) <= d.value())
                .count();
            assert!(hits as f64 <= pair_direction_bound(dist, d), "{dist}: {hits}");
        }
    }

    #[test]
    fn witness_on_a_segment() {
        let d = Scale::dyadic(5).unwrap();
        // Spacing 2 delta and |cos| > 1/2 keep projected gaps above delta.
        let p = row(20, 2.0 * d.value());
        let e = DirectionSet::arc_net(0.0, 0.3, 40);
        assert!(projection_profile(&p, &e, d).iter().all(|&n| n == 20));
        let w = kaufman_witness(&p, &e, d, 0.5).unwrap();
        assert_eq!((w.index, w.covering), (0, 20));
        let ex = kaufman_witness_exhaustive(&p, &e, d, 0.5).unwrap();
        assert_eq!(ex.covering, 20);
    }

    #[test]
    fn witness_needs_directions() {
        let d = Scale::dyadic(5).unwrap();
        let p = row(2, 0.5);
        assert_eq!(
            kaufman_witness(&p, &DirectionSet::new(Vec::new()), d, 0.5),
            Err(Error::EmptyInput)
        );
        let few = DirectionSet::half_circle_net(3);
        assert!(matches!(kaufman_witness(&p, &few, d, 0.5), Err(Error::Hypothesis(_))));
        let w = kaufman_witness(&p, &DirectionSet::half_circle_net(8), d, 0.5).unwrap();
        assert!(w.covering == 1 || w.covering == 2);
    }
}
