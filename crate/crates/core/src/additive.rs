//! Integer grid sets, sumsets, Plünnecke-Ruzsa checks and a deterministic
//! Balog-Szemerédi-Gowers extractor.
//!
//! Members of a [`GridSet`] are integers `k` standing for `k * step`, so all
//! set arithmetic is exact.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::scale::Scale;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSet {
    step: f64,
    members: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Largest `k` with `k * delta <= x`.
pub fn snap(x: f64, delta: Scale) -> i64 {
    delta.cell(x)
}

impl GridSet {
    pub fn new(step: f64, mut members: Vec<i64>) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(invalid("step", format!("{step} is not a positive real")));
        }
        members.sort_unstable();
        members.dedup();
        Ok(GridSet { step, members })
    }

    /// Integer set with step 1.
    pub fn integers(members: Vec<i64>) -> Self {
        GridSet::new(1.0, members).expect("unit step")
    }

    /// `[A]_delta` for a set of reals.
    pub fn snapped(values: &[f64], delta: Scale) -> Self {
        GridSet::new(delta.value(), values.iter().map(|&x| snap(x, delta)).collect())
            .expect("scale is positive")
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn members(&self) -> &[i64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: i64) -> bool {
        self.members.binary_search(&k).is_ok()
    }

    pub fn values(&self) -> Vec<f64> {
        self.members.iter().map(|&k| k as f64 * self.step).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> GridSet {
        GridSet {
            step: self.step,
            members: {
                let mut m: Vec<i64> = indices.iter().map(|&i| self.members[i]).collect();
                m.sort_unstable();
                m.dedup();
                m
            },
        }
    }

    fn same_grid(&self, other: &GridSet) -> Result<()> {
        if self.step == other.step {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.step,
                right: other.step,
            })
        }
    }
}

fn combine(a: &[i64], b: &[i64], sign: Sign) -> Vec<i64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(match sign {
                Sign::Plus => x + y,
                Sign::Minus => x - y,
            });
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `A + B` or `A - B`.
pub fn sumset(a: &GridSet, b: &GridSet, sign: Sign) -> Result<GridSet> {
    a.same_grid(b)?;
    Ok(GridSet {
        step: a.step,
        members: combine(&a.members, &b.members, sign),
    })
}

fn fold(b: &GridSet, times: u32) -> Vec<i64> {
    let mut acc = alloc::vec![0i64];
    for _ in 0..times {
        acc = combine(&acc, &b.members, Sign::Plus);
    }
    acc
}

/// `mB - nB` (Minkowski; `0B = {0}`).
pub fn iterated_sumset(b: &GridSet, m: u32, n: u32) -> Result<GridSet> {
    if m + n == 0 {
        return Err(invalid("m + n", "must be at least 1"));
    }
    let members = if n == 0 {
        fold(b, m)
    } else {
        combine(&fold(b, m), &fold(b, n), Sign::Minus)
    };
    Ok(GridSet {
        step: b.step,
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlunneckeReport {
    /// `ceil(|A + B| / |A|)`.
    pub c: f64,
    /// `|mB - nB|`.
    pub lhs: usize,
    /// `C^(m+n) |A|`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn plunnecke_report(a: &GridSet, b: &GridSet, m: u32, n: u32) -> Result<PlunneckeReport> {
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ab = sumset(a, b, Sign::Plus)?.len();
    let c = ab.div_ceil(a.len()) as f64;
    let lhs = iterated_sumset(b, m, n)?.len();
    let rhs = libm::pow(c, (m + n) as f64) * a.len() as f64;
    Ok(PlunneckeReport {
        c,
        lhs,
        rhs,
        holds: lhs as f64 <= rhs,
    })
}

/// Bipartite graph `G ⊆ A × B` stored as index pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGraph {
    left: GridSet,
    right: GridSet,
    edges: BTreeSet<(usize, usize)>,
}

impl PairGraph {
    pub fn new(left: GridSet, right: GridSet, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        left.same_grid(&right)?;
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= left.len() || b >= right.len()) {
            return Err(invalid("edges", format!("({a}, {b}) is out of range")));
        }
        Ok(PairGraph { left, right, edges })
    }

    pub fn complete(left: GridSet, right: GridSet) -> Result<Self> {
        let (n, m) = (left.len(), right.len());
        PairGraph::new(left, right, (0..n).flat_map(|a| (0..m).map(move |b| (a, b))))
    }

    pub fn left(&self) -> &GridSet {
        &self.left
    }

    pub fn right(&self) -> &GridSet {
        &self.right
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// `{a + b : (a, b) ∈ G}`.
    pub fn restricted_sumset(&self) -> GridSet {
        let mut m: Vec<i64> = self
            .edges
            .iter()
            .map(|&(a, b)| self.left.members[a] + self.right.members[b])
            .collect();
        m.sort_unstable();
        m.dedup();
        GridSet {
            step: self.left.step,
            members: m,
        }
    }

    /// Number of edges with both endpoints in the given index sets.
    pub fn edges_within(&self, a_idx: &[usize], b_idx: &[usize]) -> usize {
        let a: BTreeSet<usize> = a_idx.iter().copied().collect();
        let b: BTreeSet<usize> = b_idx.iter().copied().collect();
        self.edges
            .iter()
            .filter(|(x, y)| a.contains(x) && b.contains(y))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsgResult {
    pub a_sub: GridSet,
    pub b_sub: GridSet,
    /// Indices into the original `A` and `B`, ascending.
    pub a_indices: Vec<usize>,
    pub b_indices: Vec<usize>,
    /// `min(|A'|/|A|, |B'|/|B|)`.
    pub achieved_density: f64,
    /// `|A' + B'|`.
    pub achieved_sumset: usize,
    /// `|G ∩ (A' × B')| / (|A||B|)`.
    pub achieved_edge_fraction: f64,
    /// Smallest `C'` such that all three conclusions hold with `K^C'`.
    pub measured_exponent: f64,
}

fn lower_median(mut xs: Vec<usize>) -> usize {
    if xs.is_empty() {
        return 0;
    }
    xs.sort_unstable();
    xs[(xs.len() - 1) / 2]
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(alloc::vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn common(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }
}

fn log_base(k: f64, x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else if k <= 1.0 {
        f64::INFINITY
    } else {
        libm::log(x) / libm::log(k)
    }
}

fn finish(g: &PairGraph, k: f64, a_idx: Vec<usize>, b_idx: Vec<usize>) -> BsgResult {
    let a_sub = g.left.subset(&a_idx);
    let b_sub = g.right.subset(&b_idx);
    let (na, nb) = (g.left.len() as f64, g.right.len() as f64);
    let density = (a_sub.len() as f64 / na).min(b_sub.len() as f64 / nb);
    let sum = combine(&a_sub.members, &b_sub.members, Sign::Plus).len();
    let inside = g.edges_within(&a_idx, &b_idx);
    let frac = inside as f64 / (na * nb);
    let exponent = log_base(k, 1.0 / density)
        .max(log_base(k, 1.0 / frac))
        .max(log_base(k, sum as f64 / libm::sqrt(na * nb)));
    BsgResult {
        a_sub,
        b_sub,
        a_indices: a_idx,
        b_indices: b_idx,
        achieved_density: density,
        achieved_sumset: sum,
        achieved_edge_fraction: frac,
        measured_exponent: exponent,
    }
}

/// Deterministic path-of-length-three extraction.
///
/// 1. `A1`: left vertices of degree at least the (lower) median degree.
/// 2. A pair `a, a'` is bad when its codegree is below half the median degree.
/// 3. For each pivot `b0`, `A'(b0)` keeps the vertices of `N(b0) ∩ A1` with at
///    most a quarter of that neighbourhood as bad partners. The largest
///    `A'(b0)` wins (lowest `b0` on ties).
/// 4. `B'`: right vertices whose degree into `A'` is positive and at least the
///    median of those degrees.
///
/// Falls back to the first edge when a step empties out.
pub fn bsg_extract(g: &PairGraph, k: f64) -> Result<BsgResult> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(invalid("K", format!("{k} is not a finite real >= 1")));
    }
    let Some(&first) = g.edges.iter().next() else {
        return Err(Error::EmptyInput);
    };
    let (na, nb) = (g.left.len(), g.right.len());
    let size = (na * nb) as f64;
    if (g.edges.len() as f64) < size / k * (1.0 - 1e-12) {
        return Err(Error::Hypothesis(format!(
            "|G| = {} is below |A||B|/K = {}",
            g.edges.len(),
            size / k
        )));
    }
    let restricted = g.restricted_sumset().len() as f64;
    let allowed = k * libm::sqrt(size);
    if restricted > allowed * (1.0 + 1e-12) {
        return Err(Error::Hypothesis(format!(
            "restricted sumset {restricted} exceeds K |A|^1/2 |B|^1/2 = {allowed}"
        )));
    }

    let mut left_nb: Vec<Bits> = (0..na).map(|_| Bits::new(nb)).collect();
    let mut right_nb: Vec<Vec<usize>> = alloc::vec![Vec::new(); nb];
    for &(a, b) in &g.edges {
        left_nb[a].set(b);
        right_nb[b].push(a);
    }
    let degree: Vec<usize> = left_nb.iter().map(|n| n.common(n)).collect();
    let median = lower_median(degree.clone()).max(1);
    let popular: Vec<bool> = degree.iter().map(|&d| d >= median).collect();
    let bad = |x: usize, y: usize| 2 * left_nb[x].common(&left_nb[y]) < median;

    let mut best: Vec<usize> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for nbhd in &right_nb {
        let s: Vec<usize> = nbhd.iter().copied().filter(|&a| popular[a]).collect();
        if s.len() <= best.len() || !seen.insert(s.clone()) {
            continue;
        }
        let kept: Vec<usize> = s
            .iter()
            .copied()
            .filter(|&a| 4 * s.iter().filter(|&&x| x != a && bad(a, x)).count() <= s.len())
            .collect();
        if kept.len() > best.len() {
            best = kept;
        }
    }
    if best.is_empty() {
        return Ok(finish(g, k, alloc::vec![first.0], alloc::vec![first.1]));
    }

    let inside: Vec<usize> = (0..nb)
        .map(|b| best.iter().filter(|&&a| left_nb[a].get(b)).count())
        .collect();
    let threshold = lower_median(inside.clone()).max(1);
    let b_idx: Vec<usize> = (0..nb).filter(|&b| inside[b] >= threshold).collect();
    if b_idx.is_empty() {
        return Ok(finish(g, k, alloc::vec![first.0], alloc::vec![first.1]));
    }
    best.sort_unstable();
    Ok(finish(g, k, best, b_idx))
}
