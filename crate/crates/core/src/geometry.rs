//! Exact geometric index structures.
//!
//! Both indexes are balanced space-partitioning trees (median splits on
//! rotating axes, an axis-aligned bounding box per node) searched by branch
//! and bound. They guarantee *exact* answers — every query is interchangeable
//! with a linear scan — while typically visiting far fewer points. No
//! worst-case sublinear query bound is claimed; scaling is an empirical
//! property, covered by the benchmark harness rather than by contract.
//!
//! The bounding-box bounds are computed with the same multiply-then-
//! left-to-right-sum ordering as the point dot products they prune against,
//! and IEEE rounding is monotone, so a node's bound can never round below a
//! dot product inside the node. Pruning is therefore exact, not approximate.
//!
//! [`HalfspaceMaxIndex`] answers argmax-of-inner-product queries over a point
//! set and supports deletions: the proposal engine behind the one-sided
//! solver ("which remaining candidate does this chooser score highest?").
//! [`RangeEmptinessIndex`] is a static index answering "is any point strictly
//! inside the intersection of two halfspaces?", the query shape behind the
//! subquadratic attribute verifier.

use crate::error::{Error, Result};

const LEAF_SIZE: usize = 16;

/// An open halfspace `{ x : <normal, x> > threshold }`.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub threshold: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, threshold: f64) -> Halfspace {
        Halfspace { normal, threshold }
    }

    /// Strict containment test, summed in axis order.
    #[inline]
    pub fn contains(&self, point: &[f64]) -> bool {
        let mut s = 0.0;
        for i in 0..self.normal.len() {
            s += self.normal[i] * point[i];
        }
        s > self.threshold
    }
}

struct Node {
    /// Bounding box over all points ever stored in the subtree.
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Number of not-yet-deleted points below this node.
    live: usize,
    /// Smallest original point index in the subtree (static).
    min_idx: usize,
    /// Range into the permutation array (leaves only use it for scanning;
    /// internal nodes use it for subtree-wide shortcuts).
    start: usize,
    end: usize,
    /// Child node ids, or `None` for a leaf.
    children: Option<(usize, usize)>,
    parent: usize,
}

const NO_PARENT: usize = usize::MAX;

struct Tree {
    k: usize,
    /// Point coordinates, row-major.
    coords: Vec<f64>,
    /// Permutation of point indices; each node owns a contiguous slice.
    perm: Vec<usize>,
    nodes: Vec<Node>,
    /// Leaf node id containing each point.
    leaf_of: Vec<usize>,
}

impl Tree {
    fn point(&self, idx: usize) -> &[f64] {
        &self.coords[idx * self.k..(idx + 1) * self.k]
    }

    fn build(points: &[Vec<f64>], what: &'static str) -> Result<Tree> {
        let m = points.len();
        let k = points.first().map_or(0, |p| p.len());
        let mut coords = Vec::with_capacity(m * k);
        for (i, p) in points.iter().enumerate() {
            if p.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "{what}: row {i} has {} coordinates, expected {k}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        let mut tree = Tree {
            k,
            coords,
            perm: (0..m).collect(),
            nodes: Vec::new(),
            leaf_of: vec![0; m],
        };
        if m > 0 {
            let root = tree.build_node(0, m, 0, NO_PARENT);
            debug_assert_eq!(root, 0);
        }
        Ok(tree)
    }

    fn build_node(&mut self, start: usize, end: usize, depth: usize, parent: usize) -> usize {
        let id = self.nodes.len();
        let k = self.k;
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        let mut min_idx = usize::MAX;
        for &p in &self.perm[start..end] {
            min_idx = min_idx.min(p);
            for a in 0..k {
                let c = self.coords[p * k + a];
                if c < lo[a] {
                    lo[a] = c;
                }
                if c > hi[a] {
                    hi[a] = c;
                }
            }
        }
        self.nodes.push(Node {
            lo,
            hi,
            live: end - start,
            min_idx,
            start,
            end,
            children: None,
            parent,
        });
        if end - start <= LEAF_SIZE || k == 0 {
            for &p in &self.perm[start..end] {
                self.leaf_of[p] = id;
            }
            return id;
        }
        let axis = depth % k;
        let mid = start + (end - start) / 2;
        let coords = &self.coords;
        self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coords[a * k + axis].total_cmp(&coords[b * k + axis])
        });
        let left = self.build_node(start, mid, depth + 1, id);
        let right = self.build_node(mid, end, depth + 1, id);
        self.nodes[id].children = Some((left, right));
        id
    }

    /// Largest achievable `<normal, x>` over the node's box, summed in the
    /// same axis order as a point evaluation.
    #[inline]
    fn box_max(&self, node: &Node, normal: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in 0..self.k {
            s += (normal[a] * node.lo[a]).max(normal[a] * node.hi[a]);
        }
        s
    }

    /// Smallest achievable `<normal, x>` over the node's box.
    #[inline]
    fn box_min(&self, node: &Node, normal: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in 0..self.k {
            s += (normal[a] * node.lo[a]).min(normal[a] * node.hi[a]);
        }
        s
    }
}

/// Deletion-capable index answering exact argmax-of-inner-product queries:
/// among the live points, which maximizes `<direction, point>`?
pub struct HalfspaceMaxIndex {
    tree: Tree,
    alive: Vec<bool>,
    live_total: usize,
}

/// Builds a [`HalfspaceMaxIndex`] over the given points in `O(m log m)`.
/// All points start live. Rows must share one length.
pub fn hmi_build(points: &[Vec<f64>]) -> Result<HalfspaceMaxIndex> {
    let tree = Tree::build(points, "hmi_build")?;
    let m = points.len();
    Ok(HalfspaceMaxIndex {
        tree,
        alive: vec![true; m],
        live_total: m,
    })
}

impl HalfspaceMaxIndex {
    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn live_count(&self) -> usize {
        self.live_total
    }

    /// The live point index maximizing the dot product with `direction`;
    /// among exact ties, the smallest index. Errors with
    /// [`Error::NoLivePoint`] once every point is deleted.
    pub fn query_max(&self, direction: &[f64]) -> Result<usize> {
        if self.live_total == 0 {
            return Err(Error::NoLivePoint);
        }
        if direction.len() != self.tree.k {
            return Err(Error::DimensionMismatch(format!(
                "query_max: direction has {} coordinates, index holds {}-dimensional points",
                direction.len(),
                self.tree.k
            )));
        }
        let mut best: Option<(f64, usize)> = None;
        self.descend(0, direction, &mut best);
        Ok(best.expect("a live point exists").1)
    }

    fn descend(&self, node_id: usize, dir: &[f64], best: &mut Option<(f64, usize)>) {
        let node = &self.tree.nodes[node_id];
        if node.live == 0 {
            return;
        }
        if let Some((bv, bi)) = *best {
            let bound = self.tree.box_max(node, dir);
            // A live point here can only win with a strictly larger value, or
            // an equal value at a smaller index; node.min_idx bounds the
            // smallest index the subtree could ever offer.
            if bound < bv || (bound == bv && node.min_idx >= bi) {
                return;
            }
        }
        match node.children {
            None => {
                for &p in &self.tree.perm[node.start..node.end] {
                    if !self.alive[p] {
                        continue;
                    }
                    let mut v = 0.0;
                    let pt = self.tree.point(p);
                    for a in 0..self.tree.k {
                        v += dir[a] * pt[a];
                    }
                    let better = match *best {
                        None => true,
                        Some((bv, bi)) => v > bv || (v == bv && p < bi),
                    };
                    if better {
                        *best = Some((v, p));
                    }
                }
            }
            Some((left, right)) => {
                let bl = self.tree.box_max(&self.tree.nodes[left], dir);
                let br = self.tree.box_max(&self.tree.nodes[right], dir);
                if br > bl {
                    self.descend(right, dir, best);
                    self.descend(left, dir, best);
                } else {
                    self.descend(left, dir, best);
                    self.descend(right, dir, best);
                }
            }
        }
    }

    /// Marks a point deleted and decrements live counts up the spine.
    pub fn delete(&mut self, point: usize) -> Result<()> {
        if point >= self.alive.len() {
            return Err(Error::IndexOutOfRange {
                what: "point",
                index: point,
                size: self.alive.len(),
            });
        }
        if !self.alive[point] {
            return Err(Error::AlreadyDeleted(point));
        }
        self.alive[point] = false;
        self.live_total -= 1;
        let mut id = self.tree.leaf_of[point];
        loop {
            self.tree.nodes[id].live -= 1;
            if self.tree.nodes[id].parent == NO_PARENT {
                break;
            }
            id = self.tree.nodes[id].parent;
        }
        Ok(())
    }
}

/// Static index answering exact emptiness (and, as a debug hook, counting)
/// queries for the intersection of two open halfspaces.
pub struct RangeEmptinessIndex {
    tree: Tree,
}

/// Builds a [`RangeEmptinessIndex`] in `O(m log m)`. Rows must share one
/// length.
pub fn rei_build(points: &[Vec<f64>]) -> Result<RangeEmptinessIndex> {
    Ok(RangeEmptinessIndex {
        tree: Tree::build(points, "rei_build")?,
    })
}

impl RangeEmptinessIndex {
    pub fn len(&self) -> usize {
        self.tree.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.perm.is_empty()
    }

    /// Some point index strictly inside both halfspaces, or `None`. The
    /// witness is the first found in a fixed traversal order, so repeated
    /// queries are deterministic.
    pub fn exists(&self, h1: &Halfspace, h2: &Halfspace) -> Option<usize> {
        if self.tree.perm.is_empty() {
            return None;
        }
        debug_assert_eq!(h1.normal.len(), self.tree.k);
        debug_assert_eq!(h2.normal.len(), self.tree.k);
        self.find(0, h1, h2)
    }

    fn find(&self, node_id: usize, h1: &Halfspace, h2: &Halfspace) -> Option<usize> {
        let node = &self.tree.nodes[node_id];
        if self.tree.box_max(node, &h1.normal) <= h1.threshold
            || self.tree.box_max(node, &h2.normal) <= h2.threshold
        {
            return None;
        }
        if self.tree.box_min(node, &h1.normal) > h1.threshold
            && self.tree.box_min(node, &h2.normal) > h2.threshold
        {
            // The whole box is strictly inside both halfspaces.
            return Some(self.tree.perm[node.start]);
        }
        match node.children {
            None => self.tree.perm[node.start..node.end]
                .iter()
                .copied()
                .find(|&p| {
                    let pt = self.tree.point(p);
                    h1.contains(pt) && h2.contains(pt)
                }),
            Some((left, right)) => self
                .find(left, h1, h2)
                .or_else(|| self.find(right, h1, h2)),
        }
    }

    /// Debug hook: the exact number of points strictly inside both
    /// halfspaces.
    pub fn count(&self, h1: &Halfspace, h2: &Halfspace) -> usize {
        if self.tree.perm.is_empty() {
            return 0;
        }
        self.count_from(0, h1, h2)
    }

    fn count_from(&self, node_id: usize, h1: &Halfspace, h2: &Halfspace) -> usize {
        let node = &self.tree.nodes[node_id];
        if self.tree.box_max(node, &h1.normal) <= h1.threshold
            || self.tree.box_max(node, &h2.normal) <= h2.threshold
        {
            return 0;
        }
        if self.tree.box_min(node, &h1.normal) > h1.threshold
            && self.tree.box_min(node, &h2.normal) > h2.threshold
        {
            return node.end - node.start;
        }
        match node.children {
            None => self.tree.perm[node.start..node.end]
                .iter()
                .filter(|&&p| {
                    let pt = self.tree.point(p);
                    h1.contains(pt) && h2.contains(pt)
                })
                .count(),
            Some((left, right)) => {
                self.count_from(left, h1, h2) + self.count_from(right, h1, h2)
            }
        }
    }
}
