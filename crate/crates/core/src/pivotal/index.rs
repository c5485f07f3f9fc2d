//! Nearest-neighbour index over a population with per-unit deactivation.

use rand::Rng;

use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::points::Points;

const LEAF_SIZE: usize = 8;
const NO_CHILD: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    start: u32,
    end: u32,
    left: u32,
    right: u32,
    parent: u32,
    active: u32,
}

/// Static k-d tree whose leaves live in a permuted copy of the coordinates.
/// Each node tracks how many of its points are still active so empty
/// subtrees are skipped.
#[derive(Debug, Clone)]
struct KdTree {
    dim: usize,
    nodes: Vec<Node>,
    bounds: Vec<f64>,
    coords: Vec<f64>,
    ids: Vec<u32>,
    slot_of: Vec<u32>,
    leaf_of: Vec<u32>,
    slot_active: Vec<bool>,
}

impl KdTree {
    fn build(points: &Points) -> Self {
        let n = points.len();
        let dim = points.dim();
        let mut ids: Vec<u32> = (0..n as u32).collect();
        let mut tree = KdTree {
            dim,
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 2),
            bounds: Vec::new(),
            coords: Vec::new(),
            ids: Vec::new(),
            slot_of: vec![0; n],
            leaf_of: vec![0; n],
            slot_active: vec![true; n],
        };
        tree.build_node(points, &mut ids, 0, n, NO_CHILD);
        tree.coords = Vec::with_capacity(n * dim);
        for (slot, &id) in ids.iter().enumerate() {
            tree.coords.extend_from_slice(points.row(id as usize));
            tree.slot_of[id as usize] = slot as u32;
        }
        tree.ids = ids;
        tree
    }

    fn build_node(
        &mut self,
        points: &Points,
        ids: &mut [u32],
        start: usize,
        end: usize,
        parent: u32,
    ) -> u32 {
        let dim = self.dim;
        let id = self.nodes.len() as u32;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &p in &ids[start..end] {
            for (k, &x) in points.row(p as usize).iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        self.bounds.extend_from_slice(&lo);
        self.bounds.extend_from_slice(&hi);
        self.nodes.push(Node {
            start: start as u32,
            end: end as u32,
            left: NO_CHILD,
            right: NO_CHILD,
            parent,
            active: (end - start) as u32,
        });

        let (axis, spread) =
            (0..dim)
                .map(|k| (k, hi[k] - lo[k]))
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, c| if c.1 > acc.1 { c } else { acc },
                );
        if end - start <= LEAF_SIZE || spread <= 0.0 {
            for &p in &ids[start..end] {
                self.leaf_of[p as usize] = id;
            }
            return id;
        }
        let mid = start + (end - start) / 2;
        ids[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.row(a as usize)[axis].total_cmp(&points.row(b as usize)[axis])
        });
        let left = self.build_node(points, ids, start, mid, id);
        let right = self.build_node(points, ids, mid, end, id);
        let node = &mut self.nodes[id as usize];
        node.left = left;
        node.right = right;
        id
    }

    #[inline]
    fn node_bound(&self, node: u32, p: &[f64], dist: &Distance) -> f64 {
        let off = node as usize * 2 * self.dim;
        let lo = &self.bounds[off..off + self.dim];
        let hi = &self.bounds[off + self.dim..off + 2 * self.dim];
        dist.reduced_box_bound(p, lo, hi)
    }

    fn deactivate(&mut self, id: usize) {
        let slot = self.slot_of[id] as usize;
        if !self.slot_active[slot] {
            return;
        }
        self.slot_active[slot] = false;
        let mut node = self.leaf_of[id];
        while node != NO_CHILD {
            let n = &mut self.nodes[node as usize];
            n.active -= 1;
            node = n.parent;
        }
    }

    /// Collects every active point at the minimal reduced distance from `p`,
    /// skipping `exclude`. Returns that distance.
    fn nearest_ties(
        &self,
        p: &[f64],
        exclude: Option<usize>,
        dist: &Distance,
        stack: &mut Vec<(u32, f64)>,
        out: &mut Vec<usize>,
    ) -> f64 {
        let dim = self.dim;
        let mut best = f64::INFINITY;
        out.clear();
        stack.clear();
        if self.nodes[0].active > 0 {
            stack.push((0, self.node_bound(0, p, dist)));
        }
        while let Some((node_id, bound)) = stack.pop() {
            if bound > best {
                continue;
            }
            let node = &self.nodes[node_id as usize];
            if node.left == NO_CHILD {
                for slot in node.start as usize..node.end as usize {
                    if !self.slot_active[slot] {
                        continue;
                    }
                    let id = self.ids[slot] as usize;
                    if Some(id) == exclude {
                        continue;
                    }
                    let d = dist.reduced(p, &self.coords[slot * dim..(slot + 1) * dim]);
                    if d < best {
                        best = d;
                        out.clear();
                        out.push(id);
                    } else if d == best {
                        out.push(id);
                    }
                }
                continue;
            }
            let (l, r) = (node.left, node.right);
            let lb = if self.nodes[l as usize].active > 0 {
                Some(self.node_bound(l, p, dist))
            } else {
                None
            };
            let rb = if self.nodes[r as usize].active > 0 {
                Some(self.node_bound(r, p, dist))
            } else {
                None
            };
            match (lb, rb) {
                (Some(a), Some(b)) => {
                    // closer child goes on top of the stack
                    if a <= b {
                        stack.push((r, b));
                        stack.push((l, a));
                    } else {
                        stack.push((l, a));
                        stack.push((r, b));
                    }
                }
                (Some(a), None) => stack.push((l, a)),
                (None, Some(b)) => stack.push((r, b)),
                (None, None) => {}
            }
        }
        out.sort_unstable();
        best
    }
}

/// Nearest-neighbour search over the active (undecided) units of a
/// population. Units are deactivated once decided and never returned again.
///
/// Built-in metrics use a k-d tree with lazy deactivation; custom metrics use
/// a linear scan over the active units.
#[derive(Debug, Clone)]
pub struct NeighborIndex<'a> {
    points: &'a Points,
    distance: Distance,
    active: Vec<bool>,
    n_active: usize,
    tree: Option<KdTree>,
    stack: Vec<(u32, f64)>,
}

impl<'a> NeighborIndex<'a> {
    /// Index with every unit active.
    pub fn new(points: &'a Points, distance: Distance) -> Self {
        let tree = distance.supports_tree().then(|| KdTree::build(points));
        Self {
            points,
            distance,
            active: vec![true; points.len()],
            n_active: points.len(),
            tree,
            stack: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_active(&self) -> usize {
        self.n_active
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn distance(&self) -> &Distance {
        &self.distance
    }

    pub fn points(&self) -> &'a Points {
        self.points
    }

    pub fn deactivate(&mut self, i: usize) {
        if !self.active[i] {
            return;
        }
        self.active[i] = false;
        self.n_active -= 1;
        if let Some(tree) = self.tree.as_mut() {
            tree.deactivate(i);
        }
    }

    /// All active units other than `i` at minimal distance from `i`, sorted by
    /// index, together with that (reduced) distance. `out` is left empty when
    /// `i` is the only active unit.
    pub fn nearest_ties_of(&mut self, i: usize, out: &mut Vec<usize>) -> f64 {
        let p = self.points.row(i);
        match &self.tree {
            Some(tree) => tree.nearest_ties(p, Some(i), &self.distance, &mut self.stack, out),
            None => scan_ties(self.points, &self.active, &self.distance, p, Some(i), out),
        }
    }

    /// Same as [`nearest_ties_of`](Self::nearest_ties_of) for an arbitrary
    /// query point that is not itself a unit.
    pub fn nearest_ties_to(&mut self, p: &[f64], out: &mut Vec<usize>) -> f64 {
        match &self.tree {
            Some(tree) => tree.nearest_ties(p, None, &self.distance, &mut self.stack, out),
            None => scan_ties(self.points, &self.active, &self.distance, p, None, out),
        }
    }

    /// Nearest active unit to `i` (never `i` itself). Exact ties are broken
    /// uniformly at random with one `random_range` draw from `rng`; no draw is
    /// consumed when the nearest unit is unique.
    pub fn nearest_undecided<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> Result<usize> {
        let others = self.n_active - usize::from(self.active[i]);
        if others < 1 || self.n_active < 2 {
            return Err(Error::TooFewUndecided(self.n_active));
        }
        let mut ties = Vec::new();
        self.nearest_ties_of(i, &mut ties);
        Ok(pick_tie(&ties, rng))
    }
}

#[inline]
pub(crate) fn pick_tie<R: Rng + ?Sized>(ties: &[usize], rng: &mut R) -> usize {
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.random_range(0..ties.len())]
    }
}

fn scan_ties(
    points: &Points,
    active: &[bool],
    distance: &Distance,
    p: &[f64],
    exclude: Option<usize>,
    out: &mut Vec<usize>,
) -> f64 {
    let mut best = f64::INFINITY;
    out.clear();
    for (j, row) in points.rows().enumerate() {
        if !active[j] || Some(j) == exclude {
            continue;
        }
        let d = distance.reduced(p, row);
        if d < best {
            best = d;
            out.clear();
            out.push(j);
        } else if d == best {
            out.push(j);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(xs: &[f64]) -> Points {
        Points::from_column(xs).unwrap()
    }

    #[test]
    fn unique_minimizer() {
        let pts = line(&[0.0, 1.0, 3.0]);
        let mut idx = NeighborIndex::new(&pts, Distance::Euclidean);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(idx.nearest_undecided(0, &mut rng).unwrap(), 1);
    }

    #[test]
    fn symmetric_tie_is_fair() {
        let pts = line(&[0.0, 1.0, 2.0]);
        let mut idx = NeighborIndex::new(&pts, Distance::Euclidean);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = 20_000;
        let zeros = (0..m)
            .filter(|_| idx.nearest_undecided(1, &mut rng).unwrap() == 0)
            .count();
        let p = zeros as f64 / m as f64;
        let se = (0.25 / m as f64).sqrt();
        assert!((p - 0.5).abs() < 4.0 * se, "p = {p}");
    }

    #[test]
    fn decided_units_are_skipped() {
        let pts = line(&[0.0, 1.0, 2.0]);
        let mut idx = NeighborIndex::new(&pts, Distance::Euclidean);
        idx.deactivate(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(idx.nearest_undecided(0, &mut rng).unwrap(), 2);
    }

    #[test]
    fn too_few_undecided() {
        let pts = line(&[0.0, 1.0]);
        let mut idx = NeighborIndex::new(&pts, Distance::Euclidean);
        idx.deactivate(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            idx.nearest_undecided(0, &mut rng),
            Err(Error::TooFewUndecided(1))
        );
    }

    #[test]
    fn tree_matches_linear_scan_under_deactivation() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for dim in 1..=3 {
            let n = 300;
            // coarse grid values force plenty of exact ties
            let data: Vec<f64> = (0..n * dim)
                .map(|_| rng.random_range(0..6) as f64)
                .collect();
            let pts = Points::new(data, dim).unwrap();
            for metric in [
                Distance::Euclidean,
                Distance::Cityblock,
                Distance::Chebyshev,
            ] {
                let m2 = metric.clone();
                let custom = Distance::custom(move |a, b| m2.reduced(a, b));
                let mut tree = NeighborIndex::new(&pts, metric);
                let mut scan = NeighborIndex::new(&pts, custom);
                let mut order: Vec<usize> = (0..n).collect();
                for k in (1..n).rev() {
                    order.swap(k, rng.random_range(0..=k));
                }
                let (mut a, mut b) = (Vec::new(), Vec::new());
                for &gone in order.iter().take(n - 2) {
                    let q = rng.random_range(0..n);
                    let da = tree.nearest_ties_of(q, &mut a);
                    let db = scan.nearest_ties_of(q, &mut b);
                    assert_eq!(a, b);
                    assert_eq!(da, db);
                    tree.deactivate(gone);
                    scan.deactivate(gone);
                }
            }
        }
    }
}
