//! Product-like sets `P = ⋃_b A_b × {b}` and the tube bookkeeping used to
//! turn a small projection into additive structure.
//!
//! Vertices are numbered fiber-major: all points of the first fiber (lowest
//! `b`) in increasing `a`, then the next fiber, and so on. Tubes perpendicular
//! to a direction are cells of the `delta`-grid on the projected line and are
//! identified by `(direction index, cell index)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::covering::{covering_number, covering_number_of_values};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Direction, DirectionSet, Point, PointSet2D, ScalarSet};
use crate::incidence::{cauchy_schwarz_lower_bound, CauchySchwarz};
use crate::nonconc::{check_delta_t, NonConcentrationReport, Threshold};
use crate::projection::project;
use crate::scale::{cell_index, Scale};

#[derive(Debug, Clone, PartialEq)]
pub struct ProductValidation {
    /// Absent when `tau = 0` (a single fiber carries no base dimension).
    pub base: Option<NonConcentrationReport>,
    pub fibers: Vec<NonConcentrationReport>,
    pub assembled: NonConcentrationReport,
    pub threshold: Threshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductLikeSet {
    base: ScalarSet,
    fibers: Vec<ScalarSet>,
    delta: Scale,
    s: f64,
    tau: f64,
    points: Vec<Point>,
    owner: Vec<(usize, usize)>,
    validation: Option<ProductValidation>,
    warnings: Vec<String>,
}

impl ProductLikeSet {
    /// Assembles `⋃ A_b × {b}` without any `(delta, t)` checks.
    /// `fibers[i]` is the fiber over `base.values()[i]`.
    pub fn assemble(base: ScalarSet, fibers: Vec<ScalarSet>, delta: Scale, s: f64, tau: f64) -> Result<Self> {
        if fibers.len() != base.len() {
            return Err(invalid(
                "fibers",
                format!("{} fibers for {} base points", fibers.len(), base.len()),
            ));
        }
        let mut points = Vec::new();
        let mut owner = Vec::new();
        let mut warnings = Vec::new();
        for (i, (b, fiber)) in base.iter().zip(&fibers).enumerate() {
            if fiber.len() == 1 {
                warnings.push(format!("fiber over b = {b} has a single point"));
            }
            for (j, a) in fiber.iter().enumerate() {
                points.push(Point::new(a, b));
                owner.push((i, j));
            }
        }
        Ok(ProductLikeSet {
            base,
            fibers,
            delta,
            s,
            tau,
            points,
            owner,
            validation: None,
            warnings,
        })
    }

    pub fn base(&self) -> &ScalarSet {
        &self.base
    }

    pub fn fibers(&self) -> &[ScalarSet] {
        &self.fibers
    }

    pub fn fiber(&self, i: usize) -> &ScalarSet {
        &self.fibers[i]
    }

    pub fn delta(&self) -> Scale {
        self.delta
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Points in fiber-major order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `(fiber index, position in fiber)` of a vertex.
    pub fn owner(&self, vertex: usize) -> (usize, usize) {
        self.owner[vertex]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validation(&self) -> Option<&ProductValidation> {
        self.validation.as_ref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn point_set(&self) -> PointSet2D {
        PointSet2D::new(self.points.clone()).expect("fiber points are finite")
    }

    fn vertices_of(&self, fiber: usize) -> core::ops::Range<usize> {
        let start = self.owner.partition_point(|&(i, _)| i < fiber);
        start..start + self.fibers[fiber].len()
    }
}

/// Assembles a product-like set and checks the base `(delta, tau)`, every
/// fiber `(delta, s)` and the union `(delta, s + tau)` against `threshold`.
pub fn build_product_like(
    base: ScalarSet,
    fibers: Vec<ScalarSet>,
    delta: Scale,
    s: f64,
    tau: f64,
    threshold: Threshold,
) -> Result<ProductLikeSet> {
    if !(tau >= 0.0 && s + tau <= 2.0) {
        return Err(invalid("tau", format!("s + tau = {} must lie in (0, 2]", s + tau)));
    }
    let mut set = ProductLikeSet::assemble(base, fibers, delta, s, tau)?;
    let base_report = if tau > 0.0 {
        let r = check_delta_t(&set.base, delta, tau)?;
        r.require(threshold, delta, "base")?;
        Some(r)
    } else {
        None
    };
    let mut fiber_reports = Vec::with_capacity(set.fibers.len());
    for (b, fiber) in set.base.iter().zip(&set.fibers) {
        let r = check_delta_t(fiber, delta, s)?;
        r.require(threshold, delta, &format!("fiber over b = {b}"))?;
        fiber_reports.push(r);
    }
    let assembled = check_delta_t(&set.point_set(), delta, s + tau)?;
    assembled.require(threshold, delta, "assembled set")?;
    set.validation = Some(ProductValidation {
        base: base_report,
        fibers: fiber_reports,
        assembled,
        threshold,
    });
    Ok(set)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalFilter {
    pub set: ProductLikeSet,
    pub directions: DirectionSet,
    /// Positions in the input direction set of the kept directions.
    pub kept_directions: Vec<usize>,
    pub flags: Vec<String>,
}

/// Keeps the directions with `|e^1| >= 1/2` and thins each fiber so that every
/// tube perpendicular to a kept direction meets each fiber at most once.
pub fn roughly_horizontal_filter(set: &ProductLikeSet, directions: &DirectionSet) -> HorizontalFilter {
    let kept_directions: Vec<usize> = (0..directions.len())
        .filter(|&i| libm::fabs(directions.directions()[i].vector().0) >= 0.5)
        .collect();
    let kept: Vec<Direction> = kept_directions.iter().map(|&i| directions.directions()[i]).collect();
    let mut flags = Vec::new();
    if kept.is_empty() && !directions.is_empty() {
        flags.push(String::from("no roughly horizontal direction survives"));
    } else if 2 * kept.len() < directions.len() {
        flags.push(format!(
            "only {} of {} directions are roughly horizontal",
            kept.len(),
            directions.len()
        ));
    }
    let w = set.delta.value();
    let mut fibers = Vec::with_capacity(set.fibers.len());
    for (b, fiber) in set.base.iter().zip(&set.fibers) {
        let mut used: Vec<BTreeSet<i64>> = alloc::vec![BTreeSet::new(); kept.len()];
        let mut out = Vec::new();
        for a in fiber.iter() {
            let p = Point::new(a, b);
            let cells: Vec<i64> = kept.iter().map(|e| cell_index(e.project(&p), w)).collect();
            if cells.iter().zip(&used).all(|(c, u)| !u.contains(c)) {
                for (c, u) in cells.iter().zip(used.iter_mut()) {
                    u.insert(*c);
                }
                out.push(a);
            }
        }
        if 2 * out.len() < fiber.len() {
            flags.push(format!("fiber over b = {b} kept {} of {}", out.len(), fiber.len()));
        }
        let (lo, hi) = fiber.ambient();
        fibers.push(ScalarSet::new(out, lo, hi).expect("subset of a valid fiber"));
    }
    let mut filtered =
        ProductLikeSet::assemble(set.base.clone(), fibers, set.delta, set.s, set.tau).expect("same base");
    filtered.warnings.extend(flags.iter().cloned());
    HorizontalFilter {
        set: filtered,
        directions: DirectionSet::new(kept),
        kept_directions,
        flags,
    }
}

/// Identity of a tube: direction index and grid cell on the projected line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TubeId {
    pub direction: usize,
    pub cell: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationGraph {
    /// Ordered pairs `(p, q)`, `p != q`, sharing a tube, per direction.
    pub per_direction: Vec<Vec<(usize, usize)>>,
    /// `Q`: union over directions.
    pub union: BTreeSet<(usize, usize)>,
    pub cauchy_schwarz: Vec<CauchySchwarz>,
    /// `delta^(-s - 2 tau)`, the order the per-direction counts are compared to.
    pub reference: f64,
    /// `|Q| / |P|^2`.
    pub q_ratio: f64,
}

fn cells_for(points: &[Point], e: &Direction, w: f64) -> Vec<i64> {
    points.iter().map(|p| cell_index(e.project(p), w)).collect()
}

pub fn relation_graph(set: &ProductLikeSet, directions: &DirectionSet, delta: Scale) -> RelationGraph {
    let w = delta.value();
    let mut per_direction = Vec::with_capacity(directions.len());
    let mut union = BTreeSet::new();
    let mut cs = Vec::with_capacity(directions.len());
    let all = set.point_set();
    for e in directions.iter() {
        let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (v, c) in cells_for(&set.points, e, w).into_iter().enumerate() {
            groups.entry(c).or_default().push(v);
        }
        let mut edges = Vec::new();
        for members in groups.values() {
            for &p in members {
                for &q in members {
                    if p != q {
                        edges.push((p, q));
                    }
                }
            }
        }
        edges.sort_unstable();
        union.extend(edges.iter().copied());
        per_direction.push(edges);
        cs.push(cauchy_schwarz_lower_bound(&all, e, delta));
    }
    let n = set.len() as f64;
    RelationGraph {
        q_ratio: if n > 0.0 { union.len() as f64 / (n * n) } else { 0.0 },
        per_direction,
        union,
        cauchy_schwarz: cs,
        reference: libm::pow(delta.value(), -set.s - 2.0 * set.tau),
    }
}

/// `T_{b1,b2}`: one tube per related pair `(p, q) ∈ A^{b1} × A^{b2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubePairFamily {
    pub b1: usize,
    pub b2: usize,
    /// Tube to the unique pair `(p, q)` (vertex indices) it was chosen for.
    pub tubes: BTreeMap<TubeId, (usize, usize)>,
    /// Number of related pairs (equals `tubes.len()` by injectivity).
    pub related_pairs: usize,
}

fn check_base_index(set: &ProductLikeSet, b: usize) -> Result<()> {
    if b < set.base.len() {
        Ok(())
    } else {
        Err(invalid("base index", format!("{b} is out of range (|B| = {})", set.base.len())))
    }
}

/// Picks, for every pair `(p, q)` related in some direction, the tube of the
/// lowest such direction. Two pairs landing in one tube is a failure of the
/// roughly horizontal condition and is reported as an error.
pub fn tube_pair_family(
    set: &ProductLikeSet,
    b1: usize,
    b2: usize,
    directions: &DirectionSet,
    delta: Scale,
) -> Result<TubePairFamily> {
    check_base_index(set, b1)?;
    check_base_index(set, b2)?;
    let mut family = TubePairFamily {
        b1,
        b2,
        tubes: BTreeMap::new(),
        related_pairs: 0,
    };
    if b1 == b2 {
        return Ok(family);
    }
    let w = delta.value();
    let (r1, r2) = (set.vertices_of(b1), set.vertices_of(b2));
    let mut assigned: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (di, e) in directions.iter().enumerate() {
        let mut left: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for v in r1.clone() {
            left.entry(cell_index(e.project(&set.points[v]), w)).or_default().push(v);
        }
        for q in r2.clone() {
            let cell = cell_index(e.project(&set.points[q]), w);
            let Some(ps) = left.get(&cell) else { continue };
            for &p in ps {
                if !assigned.insert((p, q)) {
                    continue;
                }
                let id = TubeId { direction: di, cell };
                if let Some(prev) = family.tubes.insert(id, (p, q)) {
                    return Err(Error::Hypothesis(format!(
                        "tube (direction {di}, cell {cell}) holds pairs {prev:?} and {:?}; \
                         the directions are not roughly horizontal for these fibers",
                        (p, q)
                    )));
                }
            }
        }
    }
    family.related_pairs = assigned.len();
    Ok(family)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriplePairData {
    pub bases: (usize, usize, usize),
    pub base_values: (f64, f64, f64),
    /// `T_{b1,b2} ∩ T_{b2,b3}` in tube order.
    pub shared: Vec<TubeId>,
    /// `(a1, a3)` read off each shared tube, in tube order.
    pub pairs_by_tube: Vec<(f64, f64)>,
    /// `G'`: the distinct pairs.
    pub g_prime: Vec<(f64, f64)>,
}

impl TriplePairData {
    /// `|G'| = |T_{b1,b2} ∩ T_{b2,b3}|`.
    pub fn count_identity_holds(&self) -> bool {
        self.g_prime.len() == self.shared.len()
    }
}

fn intersect(set: &ProductLikeSet, f12: &TubePairFamily, f23: &TubePairFamily) -> TriplePairData {
    let mut shared = Vec::new();
    let mut pairs_by_tube = Vec::new();
    for (id, &(p1, _)) in &f12.tubes {
        if let Some(&(_, p3)) = f23.tubes.get(id) {
            shared.push(*id);
            pairs_by_tube.push((set.points[p1].x, set.points[p3].x));
        }
    }
    let mut g_prime = pairs_by_tube.clone();
    g_prime.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    g_prime.dedup();
    let b = set.base.values();
    TriplePairData {
        bases: (f12.b1, f12.b2, f23.b2),
        base_values: (b[f12.b1], b[f12.b2], b[f23.b2]),
        shared,
        pairs_by_tube,
        g_prime,
    }
}

pub fn triple_intersections(
    set: &ProductLikeSet,
    b1: usize,
    b2: usize,
    b3: usize,
    directions: &DirectionSet,
    delta: Scale,
) -> Result<TriplePairData> {
    if b1 == b2 || b2 == b3 || b1 == b3 {
        return Err(invalid("triple", format!("({b1}, {b2}, {b3}) is degenerate")));
    }
    let f12 = tube_pair_family(set, b1, b2, directions, delta)?;
    let f23 = tube_pair_family(set, b2, b3, directions, delta)?;
    Ok(intersect(set, &f12, &f23))
}

/// `x + (b2 - b1) / (b3 - b2) * y`.
pub fn triple_projection(x: f64, y: f64, b1: f64, b2: f64, b3: f64) -> Result<f64> {
    if b3 == b2 {
        return Err(Error::DivisionByZero("b3 - b2"));
    }
    Ok(x + (b2 - b1) / (b3 - b2) * y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Compression {
    /// Covering number of the triple-projected pairs.
    pub covering: usize,
    /// `delta^-s`.
    pub bound: f64,
}

impl Compression {
    pub fn ratio(&self) -> f64 {
        self.covering as f64 / self.bound
    }
}

pub fn compression_check(
    pairs: &[(f64, f64)],
    b1: f64,
    b2: f64,
    b3: f64,
    delta: Scale,
    s: f64,
) -> Result<Compression> {
    if b3 == b2 {
        return Err(Error::DivisionByZero("b3 - b2"));
    }
    let values = pairs
        .iter()
        .map(|&(x, y)| triple_projection(x, y, b1, b2, b3))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Compression {
        covering: covering_number_of_values(&values, delta),
        bound: libm::pow(delta.value(), -s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleRow {
    pub bases: (usize, usize, usize),
    pub base_values: (f64, f64, f64),
    pub intersection_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleScan {
    pub triples: Vec<TripleRow>,
    /// `Σ |T_{b1,b2} ∩ T_{b2,b3}|` over all separated ordered triples.
    pub total: u64,
}

/// Ordered triples of distinct base points, pairwise at least
/// `separation_min` apart, whose tube families share at least `threshold`
/// tubes.
pub fn good_triple_scan(
    set: &ProductLikeSet,
    directions: &DirectionSet,
    delta: Scale,
    separation_min: f64,
    threshold: f64,
) -> Result<TripleScan> {
    let b = set.base.values();
    let n = b.len();
    let far = |i: usize, j: usize| libm::fabs(b[i] - b[j]) >= separation_min;
    let mut families: BTreeMap<(usize, usize), TubePairFamily> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && far(i, j) {
                families.insert((i, j), tube_pair_family(set, i, j, directions, delta)?);
            }
        }
    }
    let mut scan = TripleScan {
        triples: Vec::new(),
        total: 0,
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k || !far(i, j) || !far(j, k) || !far(i, k) {
                    continue;
                }
                let f12 = &families[&(i, j)];
                let f23 = &families[&(j, k)];
                let size = f12.tubes.keys().filter(|id| f23.tubes.contains_key(id)).count();
                scan.total += size as u64;
                if size as f64 >= threshold {
                    scan.triples.push(TripleRow {
                        bases: (i, j, k),
                        base_values: (b[i], b[j], b[k]),
                        intersection_size: size,
                    });
                }
            }
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductExperiment {
    /// First direction (index, direction) with `N >= delta^(-s - eps)`.
    pub witness: Option<(usize, Direction)>,
    pub max_n: usize,
    /// `(theta, N(pi_e(P), delta))` per direction, in index order.
    pub profile: Vec<(f64, usize)>,
    pub target: f64,
    pub warnings: Vec<String>,
}

/// Exhaustive projection sweep over `E`.
pub fn product_experiment(
    set: &ProductLikeSet,
    directions: &DirectionSet,
    delta: Scale,
    s: f64,
    epsilon: f64,
) -> ProductExperiment {
    let mut warnings: Vec<String> = set.warnings.clone();
    if set.validation.is_none() {
        warnings.push(String::from("product-like set was not validated"));
    }
    if directions.check_separated(delta.value()).is_err() {
        warnings.push(String::from("direction set is not delta-separated"));
    }
    let target = libm::pow(delta.value(), -s - epsilon);
    let all = set.point_set();
    let mut out = ProductExperiment {
        witness: None,
        max_n: 0,
        profile: Vec::with_capacity(directions.len()),
        target,
        warnings,
    };
    for (i, e) in directions.iter().enumerate() {
        let n = covering_number(&project(&all, e), delta);
        if out.witness.is_none() && n as f64 >= target {
            out.witness = Some((i, *e));
        }
        out.max_n = out.max_n.max(n);
        out.profile.push((e.theta(), n));
    }
    out
}

/// `A(x, y) = (pi_{e0}(x, y), y)`, which sends `e0` to `(1, 0)`.
///
/// `A` has determinant `e0^1`; for any `e`, `pi_e(p) = pi_{e'}(A p)` with
/// `e' = (e^1 / e0^1, e^2 - e^1 e0^2 / e0^1)` (see [`renormalized_direction`]).
pub fn affine_renormalize(set: &PointSet2D, e0: &Direction) -> Result<PointSet2D> {
    if e0.vector().0 == 0.0 {
        return Err(Error::DivisionByZero("e0^1"));
    }
    PointSet2D::new(set.iter().map(|p| Point::new(e0.project(p), p.y)).collect())
}

/// Image `e'` of `e` under the renormalisation by `e0` (not unit length).
pub fn renormalized_direction(e: &Direction, e0: &Direction) -> Result<(f64, f64)> {
    let (c0, s0) = e0.vector();
    if c0 == 0.0 {
        return Err(Error::DivisionByZero("e0^1"));
    }
    let (c, s) = e.vector();
    Ok((c / c0, s - c * s0 / c0))
}
