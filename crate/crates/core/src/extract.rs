//! Extraction of large `(delta, s)`-subsets.
//!
//! The input is first thinned to a maximal `delta`-separated subset (greedy in
//! lexicographic order). The survivors are then placed in the dyadic tree
//! anchored at the origin, from unit cells down to a leaf level fine enough
//! that every leaf holds one point. A cell of side `2^-j` may keep at most
//! `ceil((2^-j / delta)^s)` points. Capacities are computed bottom-up
//! (`min(cap, sum of children)`), then the root budgets are pushed top-down,
//! serving the most populated child first and breaking ties by cell index.
//!
//! The kept count equals the minimal capped cut of the tree, hence it is at
//! least `delta^-s` times the dyadic `s`-content of the separated set.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, PointSet2D, SEPARATION_SLACK};
use crate::scale::{cell_index, Scale};

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub points: PointSet2D,
    /// Content estimate supplied by the caller.
    pub requested_content: f64,
    /// Dyadic `s`-content of the separated input (cells no smaller than `delta`).
    pub dyadic_content: f64,
    /// Guaranteed floor `delta^-s * dyadic_content` for `points.len()`.
    pub guaranteed_size: f64,
}

/// Worst-ratio guarantee of [`extract_delta_s_subset`] under the
/// diameter-`r` ball convention of [`crate::nonconc`].
///
/// A ball of diameter `r` meets at most four dyadic cells of the smallest
/// dyadic side `sigma >= r`, each capped at `ceil((sigma/delta)^s)`. For
/// dyadic `delta`, `sigma = r` and the ratio is at most 8; otherwise
/// `sigma < 2r` gives `4 (2^s + 1)`.
pub fn extraction_ratio_bound(delta: Scale, s: f64) -> f64 {
    if delta.dyadic_exponent().is_some() {
        8.0
    } else {
        4.0 * (libm::pow(2.0, s) + 1.0)
    }
}

/// Greedy maximal `delta`-separated subset, scanning in lexicographic order.
pub fn maximal_separated_subset(set: &PointSet2D, delta: Scale) -> PointSet2D {
    let r = delta.value();
    let need = r * (1.0 - SEPARATION_SLACK);
    let mut buckets: BTreeMap<(i64, i64), Vec<Point>> = BTreeMap::new();
    let mut kept = Vec::new();
    for p in set.iter() {
        let key = (libm::floor(p.x / r) as i64, libm::floor(p.y / r) as i64);
        let clash = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                buckets
                    .get(&(key.0 + dx, key.1 + dy))
                    .is_some_and(|qs| qs.iter().any(|q| q.dist(p) < need))
            })
        });
        if !clash {
            buckets.entry(key).or_default().push(*p);
            kept.push(*p);
        }
    }
    PointSet2D::new(kept).expect("subset of a valid set")
}

struct Node {
    key: (i64, i64),
    count: usize,
    capacity: usize,
    children: Vec<Node>,
    point: Option<usize>,
}

fn leaf_level(delta: Scale) -> u32 {
    // Leaves must be small enough to hold a single separated point.
    let target = delta.value() * (1.0 - SEPARATION_SLACK) / core::f64::consts::SQRT_2;
    let mut j = 0u32;
    while libm::ldexp(1.0, -(j as i32)) > target {
        j += 1;
    }
    j
}

fn cap_at(level: u32, delta: Scale, s: f64) -> usize {
    let side = libm::ldexp(1.0, -(level as i32));
    let c = libm::ceil(libm::pow(side / delta.value(), s) - 1e-9);
    if c < 1.0 {
        1
    } else {
        c as usize
    }
}

fn build(
    level: u32,
    leaf: u32,
    key: (i64, i64),
    members: Vec<usize>,
    cells: &[(i64, i64)],
    delta: Scale,
    s: f64,
) -> Node {
    let count = members.len();
    if level == leaf {
        return Node {
            key,
            count,
            capacity: 1,
            children: Vec::new(),
            point: members.first().copied(),
        };
    }
    let shift = leaf - level - 1;
    let mut groups: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for i in members {
        let (ix, iy) = cells[i];
        groups.entry((ix >> shift, iy >> shift)).or_default().push(i);
    }
    let children: Vec<Node> = groups
        .into_iter()
        .map(|(k, m)| build(level + 1, leaf, k, m, cells, delta, s))
        .collect();
    let below: usize = children.iter().map(|c| c.capacity).sum();
    Node {
        key,
        count,
        capacity: below.min(cap_at(level, delta, s)),
        children,
        point: None,
    }
}

fn allocate(node: &Node, budget: usize, out: &mut Vec<usize>) {
    if budget == 0 {
        return;
    }
    if let Some(p) = node.point {
        out.push(p);
        return;
    }
    let mut order: Vec<&Node> = node.children.iter().collect();
    order.sort_by(|a, b| b.count.cmp(&a.count).then(a.key.cmp(&b.key)));
    let mut left = budget;
    for child in order {
        if left == 0 {
            break;
        }
        let give = child.capacity.min(left);
        allocate(child, give, out);
        left -= give;
    }
}

fn content(node: &Node, level: u32, delta: Scale, s: f64) -> f64 {
    let side = libm::ldexp(1.0, -(level as i32)).max(delta.value());
    let own = libm::pow(side, s);
    if node.children.is_empty() {
        return own;
    }
    let below: f64 = node
        .children
        .iter()
        .map(|c| content(c, level + 1, delta, s))
        .sum();
    own.min(below)
}

fn forest(set: &PointSet2D, delta: Scale, s: f64) -> Vec<Node> {
    let leaf = leaf_level(delta);
    let step = libm::ldexp(1.0, -(leaf as i32));
    let cells: Vec<(i64, i64)> = set
        .iter()
        .map(|p| (cell_index(p.x, step), cell_index(p.y, step)))
        .collect();
    let mut roots: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, &(ix, iy)) in cells.iter().enumerate() {
        roots.entry((ix >> leaf, iy >> leaf)).or_default().push(i);
    }
    roots
        .into_iter()
        .map(|(k, m)| build(0, leaf, k, m, &cells, delta, s))
        .collect()
}

/// Dyadic `s`-content of `set` at resolution `delta`: the cheapest cover by
/// dyadic cells of side at most 1, each cell of side `sigma` costing
/// `max(sigma, delta)^s`.
pub fn dyadic_content(set: &PointSet2D, delta: Scale, s: f64) -> f64 {
    forest(set, delta, s)
        .iter()
        .map(|root| content(root, 0, delta, s))
        .sum()
}

/// Extracts `P ⊆ K`, `delta`-separated, whose worst `(delta, s)` ratio is at
/// most [`extraction_ratio_bound`] and whose size is at least
/// `delta^-s * dyadic_content`.
pub fn extract_delta_s_subset(
    set: &PointSet2D,
    content_estimate: f64,
    delta: Scale,
    s: f64,
) -> Result<Extraction> {
    if set.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(s > 0.0 && s <= 2.0) {
        return Err(invalid("s", alloc::format!("{s} is not in (0, 2]")));
    }
    if !(content_estimate > 0.0) {
        return Err(invalid("content", "must be positive"));
    }
    let separated = maximal_separated_subset(set, delta);
    let roots = forest(&separated, delta, s);
    let mut chosen = Vec::new();
    let mut dyadic = 0.0;
    for root in &roots {
        allocate(root, root.capacity, &mut chosen);
        dyadic += content(root, 0, delta, s);
    }
    let points = PointSet2D::new(chosen.iter().map(|&i| separated.points()[i]).collect())?
        .with_separation(delta.value())?;
    Ok(Extraction {
        points,
        requested_content: content_estimate,
        dyadic_content: dyadic,
        guaranteed_size: libm::pow(delta.value(), -s) * dyadic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonconc::check_delta_t;

    fn grid(n: usize, step: f64) -> PointSet2D {
        let pts: Vec<Point> = (0..n)
            .flat_map(|i| (0..n).map(move |j| Point::new(i as f64 * step, j as f64 * step)))
            .collect();
        PointSet2D::new(pts).unwrap()
    }

    #[test]
    fn single_point_is_kept() {
        let d = Scale::dyadic(5).unwrap();
        let k = PointSet2D::from_xy(&[(0.4, 0.6)]).unwrap();
        let out = extract_delta_s_subset(&k, libm::pow(d.value(), 0.7), d, 0.7).unwrap();
        assert_eq!(out.points.points(), k.points());
    }

    #[test]
    fn rejects_bad_input() {
        let d = Scale::dyadic(5).unwrap();
        assert_eq!(
            extract_delta_s_subset(&PointSet2D::empty(), 1.0, d, 1.0),
            Err(Error::EmptyInput)
        );
        let k = PointSet2D::from_xy(&[(0.4, 0.6)]).unwrap();
        assert!(extract_delta_s_subset(&k, 1.0, d, 0.0).is_err());
        assert!(extract_delta_s_subset(&k, 1.0, d, 2.1).is_err());
    }

    #[test]
    fn dense_cluster_is_thinned() {
        let d = Scale::dyadic(4).unwrap();
        let k = grid(40, d.value() / 8.0);
        let out = extract_delta_s_subset(&k, 1.0, d, 1.0).unwrap();
        assert!(out.points.check_separated(d.value()).is_ok());
        let rep = check_delta_t(&out.points, d, 1.0).unwrap();
        assert!(rep.worst_ratio <= extraction_ratio_bound(d, 1.0));
    }

    #[test]
    fn size_meets_content_floor() {
        let d = Scale::dyadic(6).unwrap();
        let k = grid(65, d.value());
        let out = extract_delta_s_subset(&k, 1.0, d, 1.0).unwrap();
        assert!(out.points.len() as f64 >= out.guaranteed_size - 1e-9);
        assert!(out.dyadic_content > 0.0);
    }

    #[test]
    fn line_with_s_two_keeps_everything() {
        let d = Scale::dyadic(6).unwrap();
        let k = PointSet2D::new((0..=64).map(|i| Point::new(i as f64 * d.value(), 0.0)).collect())
            .unwrap();
        let out = extract_delta_s_subset(&k, 1.0, d, 2.0).unwrap();
        assert_eq!(out.points.len(), 65);
        assert!((out.points.len() as f64) < libm::pow(d.value(), -2.0) / 10.0);
    }
}
