//! Multi-scale machinery: Frostman weights, dyadic covers, scale
//! pigeonholing, the two-scale decomposition and the rescaling identities.
//!
//! Dyadic cells are anchored at the origin; the level-`j` cell of a point is
//! `(cell_index(x, 2^-j), cell_index(y, 2^-j))`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::covering::{covering_number, covering_number_of_values};
use crate::error::{invalid, Error, Result};
use crate::extract::extract_delta_s_subset;
use crate::geometry::{Direction, DirectionSet, Point, PointSet2D, ScalarSet};
use crate::incidence::Tube;
use crate::nonconc::{check_delta_t, BallCount, NonConcentrationReport, Threshold};
use crate::product::ProductLikeSet;
use crate::projection::project_param;
use crate::scale::{cell_index, Scale};

type CellKey = (i64, i64);

fn side(level: u32) -> f64 {
    libm::ldexp(1.0, -(level as i32))
}

fn cell_of(p: &Point, level: u32) -> CellKey {
    let w = side(level);
    (cell_index(p.x, w), cell_index(p.y, w))
}

/// Finest level whose cells have side at most `delta`.
fn level_at_most(delta: f64) -> u32 {
    let mut j = 0;
    while side(j) > delta * (1.0 + 1e-12) {
        j += 1;
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrostmanCertificate {
    pub exponent: f64,
    /// Finest level inspected.
    pub finest_level: u32,
    /// `max mass(Q) / side(Q)^exponent` over dyadic cells `Q` of levels `0..=finest_level`.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet {
    points: PointSet2D,
    weights: Vec<f64>,
    total_mass: f64,
    certificate: Option<FrostmanCertificate>,
}

impl WeightedPointSet {
    /// `weights[i]` belongs to `points.points()[i]`.
    pub fn new(points: PointSet2D, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(invalid(
                "weights",
                format!("{} weights for {} points", weights.len(), points.len()),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(invalid("weights", format!("{w} is not a nonnegative real")));
        }
        let total_mass = weights.iter().sum();
        Ok(WeightedPointSet {
            points,
            weights,
            total_mass,
            certificate: None,
        })
    }

    /// Unit mass on every point.
    pub fn counting(points: PointSet2D) -> Self {
        let n = points.len();
        WeightedPointSet::new(points, alloc::vec![1.0; n]).expect("unit weights")
    }

    pub fn points(&self) -> &PointSet2D {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn certificate(&self) -> Option<FrostmanCertificate> {
        self.certificate
    }

    /// Computes and stores the Frostman certificate at the given exponent.
    pub fn certify(&mut self, exponent: f64, delta: Scale) -> FrostmanCertificate {
        let finest = level_at_most(delta.value());
        let mut max_ratio: f64 = 0.0;
        for j in 0..=finest {
            let mut mass: BTreeMap<CellKey, f64> = BTreeMap::new();
            for (p, w) in self.points.iter().zip(&self.weights) {
                *mass.entry(cell_of(p, j)).or_insert(0.0) += w;
            }
            let cap = libm::pow(side(j), exponent);
            for m in mass.values() {
                max_ratio = max_ratio.max(m / cap);
            }
        }
        let c = FrostmanCertificate {
            exponent,
            finest_level: finest,
            max_ratio,
        };
        self.certificate = Some(c);
        c
    }

    pub fn mass_in(&self, keep: impl Fn(&Point) -> bool) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| keep(p))
            .map(|(_, w)| w)
            .sum()
    }
}

/// Mass distribution on `P` with `mass(Q) <= side(Q)^exponent` for every
/// dyadic cell down to side `delta`.
///
/// Each occupied finest cell starts with its cap, split evenly over its
/// points. Going up level by level, any cell whose mass exceeds its cap has
/// all its weights scaled down proportionally.
pub fn frostman_weights(set: &PointSet2D, exponent: f64, delta: Scale) -> Result<WeightedPointSet> {
    if set.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(exponent > 0.0 && exponent <= 2.0) {
        return Err(invalid("exponent", format!("{exponent} is not in (0, 2]")));
    }
    let finest = level_at_most(delta.value());
    let n = set.len();
    let mut weights = alloc::vec![0.0; n];
    let mut groups: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
    for (i, p) in set.iter().enumerate() {
        groups.entry(cell_of(p, finest)).or_default().push(i);
    }
    let leaf_cap = libm::pow(side(finest), exponent);
    for members in groups.values() {
        for &i in members {
            weights[i] = leaf_cap / members.len() as f64;
        }
    }
    for j in (0..finest).rev() {
        let cap = libm::pow(side(j), exponent);
        let mut cells: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
        for (i, p) in set.iter().enumerate() {
            cells.entry(cell_of(p, j)).or_default().push(i);
        }
        for members in cells.values() {
            let mass: f64 = members.iter().map(|&i| weights[i]).sum();
            if mass > cap {
                let f = cap / mass;
                for &i in members {
                    weights[i] *= f;
                }
            }
        }
    }
    let mut out = WeightedPointSet::new(set.clone(), weights)?;
    out.certify(exponent, delta);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicCover {
    /// `(level, ix, iy)`, sorted.
    pub cells: Vec<(u32, i64, i64)>,
    /// `Σ sqrt(2) 2^-level`.
    pub diam_sum: f64,
    /// Coarsest level allowed (`sqrt(2) 2^-j <= delta0`).
    pub top_level: u32,
}

impl DyadicCover {
    pub fn covers(&self, p: &Point) -> bool {
        self.cells.iter().any(|&(j, ix, iy)| cell_of(p, j) == (ix, iy))
    }
}

fn diam(level: u32) -> f64 {
    core::f64::consts::SQRT_2 * side(level)
}

fn cover_cell(
    level: u32,
    finest: u32,
    key: CellKey,
    members: &[usize],
    leaf_cells: &[CellKey],
    out: &mut Vec<(u32, i64, i64)>,
) -> f64 {
    if level == finest {
        out.push((level, key.0, key.1));
        return diam(level);
    }
    let shift = finest - level - 1;
    let mut children: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
    for &i in members {
        let (x, y) = leaf_cells[i];
        children.entry((x >> shift, y >> shift)).or_default().push(i);
    }
    let mark = out.len();
    let below: f64 = children
        .iter()
        .map(|(k, m)| cover_cell(level + 1, finest, *k, m, leaf_cells, out))
        .sum();
    if diam(level) <= below {
        out.truncate(mark);
        out.push((level, key.0, key.1));
        diam(level)
    } else {
        below
    }
}

/// Dyadic cover of `P` by cells of diameter at most `delta0` and side at
/// least `delta`, minimising the diameter sum (a parent replaces its children
/// whenever its diameter does not exceed theirs in total).
pub fn efficient_cover(set: &PointSet2D, delta0: Scale, delta: Scale) -> Result<DyadicCover> {
    if delta.value() > delta0.value() {
        return Err(invalid("delta", "resolution must not exceed delta0"));
    }
    let mut top = 0;
    while diam(top) > delta0.value() * (1.0 + 1e-12) {
        top += 1;
    }
    let finest = level_at_most(delta.value()).max(top);
    let leaf_cells: Vec<CellKey> = set.iter().map(|p| cell_of(p, finest)).collect();
    let mut roots: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
    for (i, &(x, y)) in leaf_cells.iter().enumerate() {
        let s = finest - top;
        roots.entry((x >> s, y >> s)).or_default().push(i);
    }
    let mut cells = Vec::new();
    let mut diam_sum = 0.0;
    for (k, m) in &roots {
        diam_sum += cover_cell(top, finest, *k, m, &leaf_cells, &mut cells);
    }
    cells.sort_unstable();
    Ok(DyadicCover {
        cells,
        diam_sum,
        top_level: top,
    })
}

/// Quota constant `6 / pi^2`: the quotas `c / (k + 1)^2` sum to at most 1.
pub const PIGEONHOLE_CONSTANT: f64 = 6.0 / (core::f64::consts::PI * core::f64::consts::PI);

#[derive(Debug, Clone, PartialEq)]
pub struct ScalePick {
    pub level: u32,
    /// `2^(-2 level)`.
    pub delta: Scale,
    /// `μ`-mass carried by the cover cells of each level, from `top_level`.
    pub level_mass: Vec<f64>,
}

/// Smallest level `j` whose cover cells carry at least
/// `(6/pi^2) total / (j - j0 + 1)^2` of the mass.
pub fn pick_scale(cover: &DyadicCover, mu: &WeightedPointSet) -> Result<ScalePick> {
    let j0 = cover.top_level;
    let depth = cover.cells.iter().map(|c| c.0).max().unwrap_or(j0);
    let mut level_mass = alloc::vec![0.0; (depth - j0 + 1) as usize];
    let by_level: BTreeMap<u32, Vec<CellKey>> = cover.cells.iter().fold(BTreeMap::new(), |mut acc, &(j, x, y)| {
        acc.entry(j).or_insert_with(Vec::new).push((x, y));
        acc
    });
    for (p, w) in mu.points().iter().zip(mu.weights()) {
        for (&j, keys) in &by_level {
            if keys.binary_search(&cell_of(p, j)).is_ok() {
                level_mass[(j - j0) as usize] += w;
                break;
            }
        }
    }
    let total: f64 = level_mass.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("mu", "no mass on the cover"));
    }
    let found = level_mass.iter().enumerate().find(|&(k, &m)| {
        let q = (k + 1) as f64;
        m >= PIGEONHOLE_CONSTANT * total / (q * q)
    });
    let k = match found {
        Some((k, _)) => k,
        None => {
            // Unreachable: the quotas sum to less than the total.
            debug_assert!(false, "pigeonhole quota not met");
            level_mass
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                .map(|(k, _)| k)
                .unwrap_or(0)
        }
    };
    let level = j0 + k as u32;
    Ok(ScalePick {
        level,
        delta: Scale::dyadic(2 * level)?,
        level_mass,
    })
}

/// Good-ball constant: balls need mass at least `0.25 sqrt(delta) / ln(1/delta)^2`.
pub const GOOD_BALL_CONSTANT: f64 = 0.25;

/// Ratio bound enforced on both scales of a decomposition.
pub const TWO_SCALE_THRESHOLD: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    /// Dyadic cell `(ix, iy)` of side `sqrt(delta)`.
    pub cell: CellKey,
    pub mass: f64,
    pub fine: PointSet2D,
    pub anchor: Point,
}

impl Ball {
    pub fn center(&self, sqrt_delta: f64) -> Point {
        Point::new(
            (self.cell.0 as f64 + 0.5) * sqrt_delta,
            (self.cell.1 as f64 + 0.5) * sqrt_delta,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoScaleStructure {
    pub delta: Scale,
    pub sqrt_delta: Scale,
    /// Level of the ball cells (`2^-level = sqrt(delta)`).
    pub level: u32,
    pub balls: Vec<Ball>,
    /// `P_{sqrt(delta)}`: the anchors.
    pub coarse: PointSet2D,
    /// `P`: union of the fine sets.
    pub fine: PointSet2D,
    pub coarse_report: NonConcentrationReport,
    pub fine_report: NonConcentrationReport,
    pub good_mass: f64,
    pub threshold: Threshold,
}

/// Good balls at scale `sqrt(delta)`, thinned to non-adjacent cells, with a
/// `(delta, 1)`-subset extracted inside each and one anchor per ball.
pub fn two_scale_decomposition(
    set: &PointSet2D,
    mu: &WeightedPointSet,
    delta: Scale,
) -> Result<TwoScaleStructure> {
    let exp = delta
        .dyadic_exponent()
        .filter(|e| e % 2 == 0)
        .ok_or_else(|| invalid("delta", "must be 2^-2j"))?;
    if mu.points() != set {
        return Err(invalid("mu", "weights must live on the input set"));
    }
    let level = exp / 2;
    let sqrt_delta = delta.sqrt()?;
    let l = delta.log_inv();
    let good_mass = GOOD_BALL_CONSTANT * sqrt_delta.value() / (l * l);

    let mut cells: BTreeMap<CellKey, (f64, Vec<Point>)> = BTreeMap::new();
    for (p, w) in set.iter().zip(mu.weights()) {
        let e = cells.entry(cell_of(p, level)).or_insert((0.0, Vec::new()));
        e.0 += w;
        e.1.push(*p);
    }
    let mut good: Vec<(CellKey, f64)> = cells
        .iter()
        .filter(|(_, (m, _))| *m >= good_mass)
        .map(|(k, (m, _))| (*k, *m))
        .collect();
    good.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(CellKey, f64)> = Vec::new();
    for (k, m) in good {
        if kept
            .iter()
            .all(|(q, _)| (q.0 - k.0).abs() >= 2 || (q.1 - k.1).abs() >= 2)
        {
            kept.push((k, m));
        }
    }
    if kept.len() < 2 {
        return Err(Error::TooFewBalls { found: kept.len() });
    }
    kept.sort_by_key(|k| k.0);

    let mut balls = Vec::with_capacity(kept.len());
    for (k, m) in kept {
        let inside = PointSet2D::new(cells[&k].1.clone())?;
        let fine = extract_delta_s_subset(&inside, m, delta, 1.0)?.points;
        let anchor = fine.points()[0];
        balls.push(Ball {
            cell: k,
            mass: m,
            fine,
            anchor,
        });
    }
    let coarse = PointSet2D::new(balls.iter().map(|b| b.anchor).collect())?;
    let fine = PointSet2D::new(balls.iter().flat_map(|b| b.fine.iter().copied()).collect())?;
    let threshold = Threshold::flat(TWO_SCALE_THRESHOLD);
    let coarse_report = check_delta_t(&coarse, sqrt_delta, 1.0)?;
    coarse_report.require(threshold, sqrt_delta, "anchor set")?;
    let fine_report = check_delta_t(&fine, delta, 1.0)?;
    fine_report.require(threshold, delta, "fine set")?;
    for b in &balls {
        check_delta_t(&b.fine, delta, 1.0)?.require(threshold, delta, "ball")?;
    }
    Ok(TwoScaleStructure {
        delta,
        sqrt_delta,
        level,
        balls,
        coarse,
        fine,
        coarse_report,
        fine_report,
        good_mass,
        threshold,
    })
}

/// `Σ_{p != q} |p - q|^-alpha` over ordered pairs.
pub fn energy<S: BallCount + ?Sized>(set: &S, alpha: f64) -> Result<f64> {
    let n = set.size();
    let mut total = 0.0;
    for i in 0..n {
        let p = set.center(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = p.dist(&set.center(j));
            if d == 0.0 {
                return Err(invalid("points", format!("points {i} and {j} coincide")));
            }
            total += libm::pow(d, -alpha);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeRestriction {
    pub points: PointSet2D,
    /// Positions in `balls` whose anchor lies in the tube.
    pub balls: Vec<usize>,
    pub warning: Option<String>,
}

/// `P_T`: the union of the fine sets of the balls anchored inside `tube`.
pub fn restrict_to_tube(ts: &TwoScaleStructure, tube: &Tube) -> Result<TubeRestriction> {
    if tube.width != ts.sqrt_delta.value() {
        return Err(invalid("tube", format!("width {} differs from sqrt(delta)", tube.width)));
    }
    let balls: Vec<usize> = (0..ts.balls.len())
        .filter(|&i| tube.contains(&ts.balls[i].anchor))
        .collect();
    let points = PointSet2D::new(
        balls
            .iter()
            .flat_map(|&i| ts.balls[i].fine.iter().copied())
            .collect(),
    )?;
    let warning = balls
        .is_empty()
        .then(|| String::from("no anchor lies in the tube"));
    Ok(TubeRestriction {
        points,
        balls,
        warning,
    })
}

fn inverse_sqrt(delta: Scale) -> Result<(Scale, f64)> {
    let exp = delta
        .dyadic_exponent()
        .filter(|e| e % 2 == 0)
        .ok_or_else(|| invalid("delta", "must be 2^-2j for exact dilation"))?;
    Ok((delta.sqrt()?, libm::ldexp(1.0, (exp / 2) as i32)))
}

/// `F = {(delta^-1/2 x, y) : (x, y) ∈ F'}`, at scale `sqrt(delta)`.
pub fn horizontal_dilate(set: &ProductLikeSet, delta: Scale) -> Result<ProductLikeSet> {
    let (root, factor) = inverse_sqrt(delta)?;
    let fibers = set
        .fibers()
        .iter()
        .map(|f| f.scaled(factor))
        .collect::<Result<Vec<_>>>()?;
    ProductLikeSet::assemble(set.base().clone(), fibers, root, set.s(), set.tau())
}

/// Fibers of `F'` wider than `4 sqrt(delta)` (the loose width check).
pub fn wide_fibers(set: &ProductLikeSet, delta: Scale) -> Vec<usize> {
    let limit = 4.0 * libm::sqrt(delta.value());
    (0..set.fibers().len())
        .filter(|&i| set.fiber(i).width() > limit)
        .collect()
}

fn wrap_half_turn(t: f64) -> f64 {
    let pi = core::f64::consts::PI;
    let mut x = t % pi;
    if x > pi / 2.0 {
        x -= pi;
    } else if x <= -pi / 2.0 {
        x += pi;
    }
    x
}

/// `{tan(theta_e - theta_center)}` for directions within `2 sqrt(delta)` of
/// `center` (angles compared as lines, modulo pi). Offsets of `pi/4` or more
/// are always rejected so that `sec^2` stays below 2.
pub fn reparam_directions(directions: &DirectionSet, center: &Direction, delta: Scale) -> Result<ScalarSet> {
    let window = 2.0 * libm::sqrt(delta.value());
    let mut out = Vec::with_capacity(directions.len());
    for e in directions.iter() {
        let d = wrap_half_turn(e.theta() - center.theta());
        if libm::fabs(d) > window || libm::fabs(d) >= core::f64::consts::FRAC_PI_4 {
            return Err(Error::OutsideWindow {
                theta: e.theta(),
                window: window.min(core::f64::consts::FRAC_PI_4),
            });
        }
        out.push(libm::tan(d));
    }
    ScalarSet::from_values(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RescaledIdentity {
    /// `N(pi_{t'}(F), sqrt(delta))`.
    pub lhs: usize,
    /// `N(pi_t(F'), delta)`.
    pub rhs: usize,
}

/// Both sides of `N(pi_{t'}(F), sqrt(delta)) = N(pi_t(F'), delta)` with
/// `F` the horizontal dilation of `F'` and `t' = t / sqrt(delta)`.
pub fn rescaled_projection_identity(set: &ProductLikeSet, t: f64, delta: Scale) -> Result<RescaledIdentity> {
    let (root, factor) = inverse_sqrt(delta)?;
    if !(t >= 0.0 && t <= root.value()) {
        return Err(invalid("t", format!("{t} is not in [0, sqrt(delta)]")));
    }
    let dilated = horizontal_dilate(set, delta)?;
    let lhs = covering_number(&project_param(&dilated.point_set(), t * factor), root);
    let rhs = covering_number(&project_param(&set.point_set(), t), delta);
    Ok(RescaledIdentity { lhs, rhs })
}

/// `delta * N(c D + c_b D, delta)`: the measure of the union of occupied grid
/// cells of the dilated sumset.
pub fn neighborhood_sum_measure(d2: &ScalarSet, c: f64, c_b: f64, delta: Scale) -> Result<f64> {
    if c == 0.0 || c_b == 0.0 {
        return Err(invalid("c", "coefficients must be nonzero"));
    }
    let mut sums = Vec::with_capacity(d2.len() * d2.len());
    for x in d2.iter() {
        for y in d2.iter() {
            sums.push(c * x + c_b * y);
        }
    }
    Ok(delta.value() * covering_number_of_values(&sums, delta) as f64)
}

/// `Σ_e ν(e) Σ_{x != y} μ(x) μ(y) / max(|pi_e(x - y)|, delta)^s`.
pub fn directional_energy(
    mu: &WeightedPointSet,
    directions: &DirectionSet,
    nu: &[f64],
    s: f64,
    delta: Scale,
) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("s", format!("{s} is not in (0, 1)")));
    }
    if nu.len() != directions.len() {
        return Err(invalid("nu", "one weight per direction is required"));
    }
    let pts = mu.points().points();
    let w = mu.weights();
    let floor = delta.value();
    let mut total = 0.0;
    for (e, &ne) in directions.iter().zip(nu) {
        let proj: Vec<f64> = pts.iter().map(|p| e.project(p)).collect();
        let mut inner = 0.0;
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                if i != j {
                    let d = libm::fabs(proj[i] - proj[j]).max(floor);
                    inner += w[i] * w[j] / libm::pow(d, s);
                }
            }
        }
        total += ne * inner;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, step: f64) -> PointSet2D {
        PointSet2D::new(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| Point::new(i as f64 * step, j as f64 * step)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn frostman_single_point() {
        let d = Scale::dyadic(6).unwrap();
        let p = PointSet2D::from_xy(&[(0.3, 0.3)]).unwrap();
        let mu = frostman_weights(&p, 1.0, d).unwrap();
        assert_eq!(mu.weights(), &[d.value()]);
    }

    #[test]
    fn frostman_one_cell_cluster() {
        let d = Scale::dyadic(4).unwrap();
        let p = grid(5, d.value() / 8.0);
        let mu = frostman_weights(&p, 1.0, d).unwrap();
        assert!(mu.total_mass() <= d.value() * (1.0 + 1e-12));
        assert!(mu.certificate().unwrap().max_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn frostman_rejects_bad_input() {
        let d = Scale::dyadic(4).unwrap();
        assert_eq!(frostman_weights(&PointSet2D::empty(), 1.0, d), Err(Error::EmptyInput));
        let p = PointSet2D::from_xy(&[(0.3, 0.3)]).unwrap();
        assert!(frostman_weights(&p, 0.0, d).is_err());
    }

    #[test]
    fn cover_examples() {
        let d0 = Scale::new(0.25).unwrap();
        let d = Scale::dyadic(6).unwrap();
        let one = PointSet2D::from_xy(&[(0.3, 0.3)]).unwrap();
        let c = efficient_cover(&one, d0, d).unwrap();
        assert_eq!(c.cells.len(), 1);
        let two = PointSet2D::from_xy(&[(0.01, 0.01), (0.02, 0.01), (0.9, 0.9), (0.91, 0.9)]).unwrap();
        let c = efficient_cover(&two, d0, d).unwrap();
        assert!(c.cells.len() >= 2);
        assert!(two.iter().all(|p| c.covers(p)));
        assert!(c.cells.iter().all(|&(j, _, _)| diam(j) <= d0.value()));
    }

    #[test]
    fn pick_scale_single_level() {
        let d0 = Scale::new(0.5).unwrap();
        let d = Scale::dyadic(8).unwrap();
        let p = PointSet2D::from_xy(&[(0.3, 0.3)]).unwrap();
        let cover = efficient_cover(&p, d0, d).unwrap();
        let mu = WeightedPointSet::counting(p);
        let pick = pick_scale(&cover, &mu).unwrap();
        assert_eq!(pick.level, cover.cells[0].0);
        assert_eq!(pick.delta.value(), libm::ldexp(1.0, -2 * pick.level as i32));
    }

    #[test]
    fn two_scale_single_cluster_fails() {
        let d = Scale::dyadic(8).unwrap();
        let p = grid(8, d.value());
        let mu = frostman_weights(&p, 1.0, d).unwrap();
        assert_eq!(two_scale_decomposition(&p, &mu, d), Err(Error::TooFewBalls { found: 1 }));
    }

    #[test]
    fn energy_examples() {
        let p = PointSet2D::from_xy(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(energy(&p, 0.3).unwrap(), 2.0);
        let q = PointSet2D::from_xy(&[(0.0, 0.0), (0.5, 0.0)]).unwrap();
        assert_eq!(energy(&q, 1.0).unwrap(), 4.0);
        let s = ScalarSet::from_values(alloc::vec![0.0, 0.5]).unwrap();
        assert_eq!(energy(&s, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn dilation_of_small_fiber() {
        let d = Scale::dyadic(8).unwrap();
        let f = ScalarSet::from_values(alloc::vec![0.0, d.value(), 2.0 * d.value()]).unwrap();
        let p = ProductLikeSet::assemble(ScalarSet::from_values(alloc::vec![0.0]).unwrap(), alloc::vec![f], d, 0.5, 0.0)
            .unwrap();
        let q = horizontal_dilate(&p, d).unwrap();
        let r = d.sqrt().unwrap().value();
        assert_eq!(q.fiber(0).values(), &[0.0, r, 2.0 * r]);
        assert!(horizontal_dilate(&p, Scale::dyadic(7).unwrap()).is_err());
    }

    #[test]
    fn reparam_examples() {
        let d = Scale::dyadic(10).unwrap();
        let c = Direction::from_angle(0.3);
        let t = reparam_directions(&DirectionSet::new(alloc::vec![c]), &c, d).unwrap();
        assert_eq!(t.values(), &[0.0]);
        let far = DirectionSet::from_angles(&[0.3 + core::f64::consts::FRAC_PI_4]);
        assert!(matches!(reparam_directions(&far, &c, Scale::new(0.24).unwrap()), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn neighborhood_examples() {
        let d = Scale::dyadic(6).unwrap();
        let zero = ScalarSet::from_values(alloc::vec![0.0]).unwrap();
        assert_eq!(neighborhood_sum_measure(&zero, 1.0, 0.8, d).unwrap(), d.value());
        let ap = ScalarSet::from_values((0..10).map(|k| k as f64 * d.value()).collect()).unwrap();
        assert_eq!(neighborhood_sum_measure(&ap, 1.0, 1.0, d).unwrap(), d.value() * 19.0);
        assert!(neighborhood_sum_measure(&ap, 0.0, 1.0, d).is_err());
    }

    #[test]
    fn directional_energy_examples() {
        let d = Scale::dyadic(6).unwrap();
        let mu = WeightedPointSet::counting(PointSet2D::from_xy(&[(0.0, 0.0), (1.0, 0.0)]).unwrap());
        let along = DirectionSet::new(alloc::vec![Direction::horizontal()]);
        assert_eq!(directional_energy(&mu, &along, &[1.0], 0.5, d).unwrap(), 2.0);
        let across = DirectionSet::new(alloc::vec![Direction::vertical()]);
        let v = directional_energy(&mu, &across, &[1.0], 0.5, d).unwrap();
        assert!((v - 2.0 * libm::pow(d.value(), -0.5)).abs() < 1e-9);
    }
}
