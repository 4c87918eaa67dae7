//! Seeded test-set generators.
//!
//! Randomness comes from ChaCha8 keyed by the user seed, with the stream
//! number set to the id of the cell (or fiber) being processed. Every random
//! decision therefore depends only on `(seed, position in the tree)`, never
//! on the order in which cells are visited.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, PointSet2D, ScalarSet};
use crate::product::ProductLikeSet;
use crate::scale::Scale;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `{origin + k step : 0 <= k < n}`.
pub fn gen_ap(n: usize, step: f64, origin: f64) -> Result<ScalarSet> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step", format!("{step} is not a positive real")));
    }
    ScalarSet::from_values((0..n).map(|k| origin + k as f64 * step).collect())
}

/// Left endpoints of the `depth`-th iterate of the two-piece Cantor
/// construction on `[0, 1]` with the given contraction.
pub fn gen_cantor_1d(contraction: f64, depth: u32) -> Result<ScalarSet> {
    if !(contraction > 0.0 && contraction < 0.5) {
        return Err(invalid("contraction", format!("{contraction} is not in (0, 1/2)")));
    }
    let mut lefts = alloc::vec![0.0];
    let mut len = 1.0;
    for _ in 0..depth {
        let child = len * contraction;
        let gap = len - child;
        lefts = lefts.iter().flat_map(|&x| [x, x + gap]).collect();
        len = child;
    }
    ScalarSet::new(lefts, 0.0, 1.0)
}

/// Product of two contraction-1/4 Cantor iterates: `4^depth` points,
/// `4^-depth`-separated.
pub fn gen_four_corner(depth: u32) -> Result<PointSet2D> {
    let c = gen_cantor_1d(0.25, depth)?;
    let pts = c
        .iter()
        .flat_map(|x| c.iter().map(move |y| Point::new(x, y)))
        .collect();
    PointSet2D::new(pts)?.with_separation(libm::ldexp(1.0, -2 * depth as i32))
}

fn frostman_capacities(levels: u32, exponent: f64, arity: usize) -> Vec<usize> {
    // capacity[j] = most points a level-j cell can receive.
    let mut cap = alloc::vec![1usize; levels as usize + 1];
    for j in (0..levels).rev() {
        let own = libm::floor(libm::pow(libm::ldexp(1.0, (levels - j) as i32), exponent) + 1e-9);
        let own = if own < 1.0 { 1 } else { own as usize };
        cap[j as usize] = own.min(arity.saturating_mul(cap[j as usize + 1]));
    }
    cap
}

fn split(count: usize, room: usize, arity: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut parts = alloc::vec![0usize; arity];
    for _ in 0..count {
        let open: Vec<usize> = (0..arity).filter(|&c| parts[c] < room).collect();
        let pick = open[rng.random_range(0..open.len())];
        parts[pick] += 1;
    }
    parts
}

fn dyadic_levels(delta: Scale) -> Result<u32> {
    match delta.dyadic_exponent() {
        Some(j) if j <= 30 => Ok(j),
        _ => Err(invalid("delta", "must be 2^-j with j <= 30")),
    }
}

/// `n` points on the corners of the `delta`-grid in `[0, 1)^2` such that every
/// dyadic cell of side `2^-j` holds at most `floor((2^-j / delta)^exponent)`.
pub fn gen_random_frostman(n: usize, exponent: f64, delta: Scale, seed: u64) -> Result<PointSet2D> {
    if !(exponent > 0.0 && exponent <= 2.0) {
        return Err(invalid("exponent", format!("{exponent} is not in (0, 2]")));
    }
    let levels = dyadic_levels(delta)?;
    let cap = frostman_capacities(levels, exponent, 4);
    if n == 0 || n > cap[0] {
        return Err(Error::Infeasible(format!(
            "{n} points do not fit (at most {} at this scale and exponent)",
            cap[0]
        )));
    }
    // (level, ix, iy) -> count; processed coarse to fine.
    let mut frontier: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    frontier.insert((0, 0), n);
    for j in 0..levels {
        let mut next = BTreeMap::new();
        let base_id = ((1u64 << (2 * j)) - 1) / 3;
        for (&(ix, iy), &m) in &frontier {
            let id = base_id + ((ix as u64) << j) + iy as u64;
            let parts = split(m, cap[j as usize + 1], 4, &mut stream(seed, id));
            for (c, &k) in parts.iter().enumerate() {
                if k > 0 {
                    next.insert((2 * ix + (c as i64 >> 1), 2 * iy + (c as i64 & 1)), k);
                }
            }
        }
        frontier = next;
    }
    let d = delta.value();
    let pts = frontier
        .keys()
        .map(|&(ix, iy)| Point::new(ix as f64 * d, iy as f64 * d))
        .collect();
    PointSet2D::new(pts)?.with_separation(d)
}

/// One-dimensional analogue of [`gen_random_frostman`] on `[0, 1)`.
pub fn gen_random_frostman_1d(n: usize, exponent: f64, delta: Scale, seed: u64) -> Result<ScalarSet> {
    if !(exponent > 0.0 && exponent <= 1.0) {
        return Err(invalid("exponent", format!("{exponent} is not in (0, 1]")));
    }
    let levels = dyadic_levels(delta)?;
    let cap = frostman_capacities(levels, exponent, 2);
    if n == 0 || n > cap[0] {
        return Err(Error::Infeasible(format!(
            "{n} points do not fit (at most {} at this scale and exponent)",
            cap[0]
        )));
    }
    let mut frontier: BTreeMap<i64, usize> = BTreeMap::new();
    frontier.insert(0, n);
    for j in 0..levels {
        let mut next = BTreeMap::new();
        for (&ix, &m) in &frontier {
            let id = (1u64 << j) - 1 + ix as u64;
            let parts = split(m, cap[j as usize + 1], 2, &mut stream(seed, id));
            for (c, &k) in parts.iter().enumerate() {
                if k > 0 {
                    next.insert(2 * ix + c as i64, k);
                }
            }
        }
        frontier = next;
    }
    let d = delta.value();
    ScalarSet::new(frontier.keys().map(|&k| k as f64 * d).collect(), 0.0, 1.0)
}

/// `⋃_{b ∈ B} A × {b}` with the same fiber over every base point.
pub fn gen_product(base: &ScalarSet, fiber: &ScalarSet, delta: Scale, s: f64, tau: f64) -> Result<ProductLikeSet> {
    ProductLikeSet::assemble(base.clone(), alloc::vec![fiber.clone(); base.len()], delta, s, tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedLines {
    pub slope: f64,
    pub intercept: f64,
    /// Horizontal spacing between consecutive planted lines.
    pub spacing: f64,
    pub lines: usize,
    /// Maximal absolute horizontal perturbation per point.
    pub jitter: f64,
}

/// Fibers over `B` made of the points `intercept + k spacing + slope (b - b0)`
/// (`b0 = min B`, `k < lines`), each moved by an independent uniform offset in
/// `[-jitter, jitter]`.
pub fn gen_planted_collinear(
    base: &ScalarSet,
    lines: PlantedLines,
    delta: Scale,
    s: f64,
    tau: f64,
    seed: u64,
) -> Result<ProductLikeSet> {
    if base.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(lines.jitter >= 0.0 && lines.jitter <= delta.value() / 2.0) {
        return Err(invalid("jitter", "must lie in [0, delta/2]"));
    }
    if lines.lines == 0 {
        return Err(invalid("lines", "must be at least 1"));
    }
    let b0 = base.values()[0];
    let mut fibers = Vec::with_capacity(base.len());
    for (i, b) in base.iter().enumerate() {
        let mut rng = stream(seed, i as u64);
        let values = (0..lines.lines)
            .map(|k| {
                let noise = if lines.jitter > 0.0 {
                    rng.random_range(-lines.jitter..=lines.jitter)
                } else {
                    0.0
                };
                lines.intercept + k as f64 * lines.spacing + lines.slope * (b - b0) + noise
            })
            .collect();
        fibers.push(ScalarSet::from_values(values)?);
    }
    ProductLikeSet::assemble(base.clone(), fibers, delta, s, tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Ap,
    Cantor1d,
    FourCorner,
    Product,
    RandomFrostman,
    PlantedCollinear,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Ap => "ap",
            GeneratorKind::Cantor1d => "cantor1d",
            GeneratorKind::FourCorner => "four_corner",
            GeneratorKind::Product => "product",
            GeneratorKind::RandomFrostman => "random_frostman",
            GeneratorKind::PlantedCollinear => "planted_collinear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ap" => GeneratorKind::Ap,
            "cantor1d" => GeneratorKind::Cantor1d,
            "four_corner" => GeneratorKind::FourCorner,
            "product" => GeneratorKind::Product,
            "random_frostman" => GeneratorKind::RandomFrostman,
            "planted_collinear" => GeneratorKind::PlantedCollinear,
            other => return Err(invalid("kind", format!("unknown generator `{other}`"))),
        })
    }
}

/// A generator invocation: kind, seed and string parameters.
///
/// Text form, one `key=value` per line (`#` starts a comment):
///
/// ```text
/// kind=random_frostman
/// seed=7
/// n=256
/// exponent=1
/// delta=0.00390625
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Generated {
    Scalars(ScalarSet),
    Points(PointSet2D),
    Product(ProductLikeSet),
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut seed = 0;
        let mut params = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid("spec", format!("line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "kind" => kind = Some(GeneratorKind::parse(v)?),
                "seed" => {
                    seed = v
                        .parse()
                        .map_err(|_| invalid("seed", format!("line {}: `{v}` is not a u64", n + 1)))?
                }
                _ => {
                    params.insert(k.to_string(), v.to_string());
                }
            }
        }
        let kind = kind.ok_or_else(|| invalid("kind", "missing"))?;
        Ok(GeneratorSpec { kind, seed, params })
    }

    /// Canonical text: `kind`, `seed`, then parameters in key order.
    pub fn to_text(&self) -> String {
        let mut out = format!("kind={}\nseed={}\n", self.kind.name(), self.seed);
        for (k, v) in &self.params {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    fn get<T: core::str::FromStr>(&self, key: &'static str) -> Result<T> {
        let raw = self
            .params
            .get(key)
            .ok_or_else(|| invalid(key, "missing"))?;
        raw.parse()
            .map_err(|_| invalid(key, format!("cannot parse `{raw}`")))
    }

    fn get_or<T: core::str::FromStr>(&self, key: &'static str, default: T) -> Result<T> {
        if self.params.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    pub fn run(&self) -> Result<Generated> {
        Ok(match self.kind {
            GeneratorKind::Ap => Generated::Scalars(gen_ap(
                self.get("n")?,
                self.get("step")?,
                self.get_or("origin", 0.0)?,
            )?),
            GeneratorKind::Cantor1d => {
                Generated::Scalars(gen_cantor_1d(self.get("contraction")?, self.get("depth")?)?)
            }
            GeneratorKind::FourCorner => Generated::Points(gen_four_corner(self.get("depth")?)?),
            GeneratorKind::RandomFrostman => Generated::Points(gen_random_frostman(
                self.get("n")?,
                self.get("exponent")?,
                Scale::new(self.get("delta")?)?,
                self.seed,
            )?),
            GeneratorKind::Product => {
                let delta = Scale::new(self.get("delta")?)?;
                let base = gen_ap(self.get("base_n")?, self.get("base_step")?, self.get_or("base_origin", 0.0)?)?;
                let fiber = gen_ap(self.get("fiber_n")?, self.get("fiber_step")?, self.get_or("fiber_origin", 0.0)?)?;
                Generated::Product(gen_product(
                    &base,
                    &fiber,
                    delta,
                    self.get_or("s", 0.5)?,
                    self.get_or("tau", 0.5)?,
                )?)
            }
            GeneratorKind::PlantedCollinear => {
                let delta = Scale::new(self.get("delta")?)?;
                let base = gen_ap(self.get("base_n")?, self.get("base_step")?, self.get_or("base_origin", 0.0)?)?;
                let lines = PlantedLines {
                    slope: self.get_or("slope", 0.0)?,
                    intercept: self.get_or("intercept", 0.0)?,
                    spacing: self.get_or("spacing", 2.0 * delta.value())?,
                    lines: self.get_or("lines", 1)?,
                    jitter: self.get_or("jitter", 0.0)?,
                };
                Generated::Product(gen_planted_collinear(
                    &base,
                    lines,
                    delta,
                    self.get_or("s", 0.5)?,
                    self.get_or("tau", 0.5)?,
                    self.seed,
                )?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonconc::check_delta_t;

    #[test]
    fn ap_examples() {
        assert_eq!(gen_ap(1, 0.5, 0.3).unwrap().values(), &[0.3]);
        assert_eq!(gen_ap(3, 0.25, 0.0).unwrap().values(), &[0.0, 0.25, 0.5]);
        assert!(gen_ap(0, 0.5, 0.0).is_err());
        assert!(gen_ap(3, 0.0, 0.0).is_err());
    }

    #[test]
    fn cantor_examples() {
        assert_eq!(gen_cantor_1d(0.25, 0).unwrap().values(), &[0.0]);
        // Recursion by hand: [0,1] -> [0,1/4] ∪ [3/4,1] -> lefts 0, 3/16, 3/4, 15/16.
        assert_eq!(
            gen_cantor_1d(0.25, 2).unwrap().values(),
            &[0.0, 3.0 / 16.0, 0.75, 15.0 / 16.0]
        );
        assert!(gen_cantor_1d(0.5, 2).is_err());
    }

    #[test]
    fn four_corner_counts() {
        assert_eq!(gen_four_corner(0).unwrap().len(), 1);
        assert_eq!(gen_four_corner(2).unwrap().len(), 16);
    }

    #[test]
    fn frostman_small_cases() {
        let d = Scale::dyadic(4).unwrap();
        assert_eq!(gen_random_frostman(1, 1.0, d, 3).unwrap().len(), 1);
        let full = gen_random_frostman(256, 2.0, d, 3).unwrap();
        assert_eq!(full.len(), 256);
        assert!(gen_random_frostman(17, 1.0, d, 3).is_err());
        let p = gen_random_frostman(16, 1.0, d, 9).unwrap();
        assert!(check_delta_t(&p, d, 1.0).unwrap().worst_ratio <= 8.0);
    }

    #[test]
    fn frostman_is_seed_deterministic() {
        let d = Scale::dyadic(6).unwrap();
        let a = gen_random_frostman(50, 1.0, d, 11).unwrap();
        let b = gen_random_frostman(50, 1.0, d, 11).unwrap();
        let c = gen_random_frostman(50, 1.0, d, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn planted_examples() {
        let d = Scale::dyadic(10).unwrap();
        let base = ScalarSet::from_values(alloc::vec![0.0, 0.5, 1.0]).unwrap();
        let flat = PlantedLines {
            slope: 0.0,
            intercept: 0.25,
            spacing: 0.1,
            lines: 1,
            jitter: 0.0,
        };
        let p = gen_planted_collinear(&base, flat, d, 0.5, 0.5, 1).unwrap();
        assert!(p.fibers().iter().all(|f| f.values() == [0.25]));
        let tilted = PlantedLines { slope: 1.0, ..flat };
        let p = gen_planted_collinear(&base, tilted, d, 0.5, 0.5, 1).unwrap();
        assert_eq!(p.fiber(2).values(), &[1.25]);
        let bad = PlantedLines { jitter: d.value(), ..flat };
        assert!(gen_planted_collinear(&base, bad, d, 0.5, 0.5, 1).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec = GeneratorSpec::new(GeneratorKind::RandomFrostman, 7)
            .with("n", 32)
            .with("exponent", 1.0)
            .with("delta", 0.015625);
        let text = spec.to_text();
        let back = GeneratorSpec::parse(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.run().unwrap(), spec.run().unwrap());
        assert!(GeneratorSpec::parse("seed=1\n").is_err());
        assert!(GeneratorSpec::parse("kind=nope\n").is_err());
    }
}
