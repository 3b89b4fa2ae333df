//! Dominance search with deletions.
//!
//! The index stores points `x'` in `R^d` and answers "report every live
//! point with `x'_i >= q_i - eps` for all `i`", removing the reported points.
//! Only deletions are supported; the live set shrinks monotonically.
//!
//! Two backends implement the same contract:
//!
//! * [`Backend::Tree`]: a layered range tree. Levels `0..d-2` are balanced
//!   trees over one coordinate each, every internal node carrying an
//!   associated structure for the remaining coordinates. The innermost level
//!   sorts its entries by coordinate `d-2` and keeps a max tree over
//!   coordinate `d-1`, so the last two coordinates cost one `O(log n)`
//!   descent. Space and build time are `O(n log^{d-2} n)` (`O(n log n)` for
//!   `d <= 2`); a query reporting `k` points costs `O(log^{d-1} n + k log n)`
//!   amortized over the deletions.
//! * [`Backend::Reference`]: a linear scan over the live list.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    #[default]
    Tree,
    Reference,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Tree => "tree",
            Backend::Reference => "reference",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tree" => Ok(Backend::Tree),
            "reference" => Ok(Backend::Reference),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

/// A point after applying a cone matrix, with the identity of the original.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedPoint {
    pub tcoords: Vec<f64>,
    pub point_index: usize,
    /// Sweep key value of the original point.
    pub key: f64,
    /// Position of the original point in the refined sweep order.
    pub rank: usize,
}

/// Leaf buckets of the range tree are scanned directly.
const BUCKET: usize = 12;

/// Entries per leaf of the innermost max trees.
const SEG_BUCKET: usize = 8;

const NO_SLOT: u32 = u32::MAX;

pub struct DominanceIndex {
    dim: usize,
    coords: Vec<f64>,
    point_index: Vec<usize>,
    keys: Vec<f64>,
    ranks: Vec<usize>,
    alive: Vec<bool>,
    live: usize,
    lower: Vec<f64>,
    inner: Inner,
}

enum Inner {
    Reference(Vec<u32>),
    Tree(Layer),
}

struct QueryCtx<'a> {
    lower: &'a [f64],
    coords: &'a [f64],
    dim: usize,
    alive: &'a mut [bool],
    exclude: u32,
    out: &'a mut Vec<u32>,
    remove: bool,
    first_only: bool,
}

impl QueryCtx<'_> {
    /// Handles a candidate already known to dominate. Returns true to stop.
    #[inline]
    fn report(&mut self, slot: u32) -> bool {
        if self.first_only {
            return true;
        }
        self.out.push(slot);
        if self.remove {
            self.alive[slot as usize] = false;
        }
        false
    }

    #[inline]
    fn dominates_from(&self, slot: u32, axis: usize) -> bool {
        let base = slot as usize * self.dim;
        (axis..self.dim).all(|j| self.coords[base + j] >= self.lower[j])
    }
}

impl DominanceIndex {
    /// Builds an index over `points`; slot `i` holds `points[i]`.
    pub fn build(dim: usize, points: &[TransformedPoint], backend: Backend) -> Self {
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            assert_eq!(p.tcoords.len(), dim, "transformed point has wrong dimension");
            coords.extend_from_slice(&p.tcoords);
        }
        let mut index = Self::from_flat(dim, coords, points.iter().map(|p| p.point_index).collect(), backend);
        index.keys = points.iter().map(|p| p.key).collect();
        index.ranks = points.iter().map(|p| p.rank).collect();
        index
    }

    /// Builds from row-major transformed coordinates. Keys are left at zero
    /// and ranks equal slots.
    pub fn from_flat(dim: usize, coords: Vec<f64>, point_index: Vec<usize>, backend: Backend) -> Self {
        assert!(dim >= 1);
        let n = point_index.len();
        assert_eq!(coords.len(), n * dim);
        assert!(n < NO_SLOT as usize);
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        let inner = match backend {
            Backend::Reference => Inner::Reference((0..n as u32).collect()),
            Backend::Tree => Inner::Tree(build_tree(dim, &coords, n)),
        };
        DominanceIndex {
            dim,
            coords,
            point_index,
            keys: vec![0.0; n],
            ranks: (0..n).collect(),
            alive: vec![true; n],
            live: n,
            lower: vec![0.0; dim],
            inner,
        }
    }

    pub fn backend(&self) -> Backend {
        match self.inner {
            Inner::Reference(_) => Backend::Reference,
            Inner::Tree(_) => Backend::Tree,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn is_live(&self, slot: usize) -> bool {
        self.alive[slot]
    }

    pub fn point_index(&self, slot: usize) -> usize {
        self.point_index[slot]
    }

    pub fn tcoords(&self, slot: usize) -> &[f64] {
        &self.coords[slot * self.dim..(slot + 1) * self.dim]
    }

    pub fn record(&self, slot: usize) -> TransformedPoint {
        TransformedPoint {
            tcoords: self.tcoords(slot).to_vec(),
            point_index: self.point_index[slot],
            key: self.keys[slot],
            rank: self.ranks[slot],
        }
    }

    /// Removes and returns every live point dominating `q` (within `eps`),
    /// except the record of `exclude_point`, which stays live.
    pub fn extract_dominating(&mut self, q: &[f64], eps: f64, exclude_point: Option<usize>) -> Vec<TransformedPoint> {
        let exclude = exclude_point.and_then(|p| self.point_index.iter().position(|&x| x == p));
        let mut slots = Vec::new();
        self.extract_dominating_into(q, eps, exclude.map(|s| s as u32), &mut slots);
        slots.into_iter().map(|s| self.record(s as usize)).collect()
    }

    /// Slot-based extraction; appends the removed slots to `out`.
    pub fn extract_dominating_into(&mut self, q: &[f64], eps: f64, exclude_slot: Option<u32>, out: &mut Vec<u32>) {
        let before = out.len();
        self.run(q, eps, exclude_slot, out, true, false);
        self.live -= out.len() - before;
    }

    /// Whether some live point other than `exclude_slot` dominates `q`.
    /// Nothing is removed.
    pub fn any_dominating(&mut self, q: &[f64], eps: f64, exclude_slot: Option<u32>) -> bool {
        let mut out = Vec::new();
        self.run(q, eps, exclude_slot, &mut out, false, true)
    }

    fn run(&mut self, q: &[f64], eps: f64, exclude: Option<u32>, out: &mut Vec<u32>, remove: bool, first_only: bool) -> bool {
        assert_eq!(q.len(), self.dim, "query has wrong dimension");
        for (l, x) in self.lower.iter_mut().zip(q) {
            *l = x - eps;
        }
        let mut ctx = QueryCtx {
            lower: &self.lower,
            coords: &self.coords,
            dim: self.dim,
            alive: &mut self.alive,
            exclude: exclude.unwrap_or(NO_SLOT),
            out,
            remove,
            first_only,
        };
        match &mut self.inner {
            Inner::Reference(live) => {
                let mut i = 0;
                while i < live.len() {
                    let slot = live[i];
                    if slot != ctx.exclude && ctx.dominates_from(slot, 0) {
                        if ctx.report(slot) {
                            return true;
                        }
                        if remove {
                            live.swap_remove(i);
                            continue;
                        }
                    }
                    i += 1;
                }
                false
            }
            Inner::Tree(root) => root.query(&mut ctx),
        }
    }
}

enum Layer {
    Seg(SegLayer),
    Inner(InnerLayer),
}

/// Innermost level: entries sorted by coordinate `key_axis` (absent for
/// `d = 1`), with a max tree over the last coordinate.
///
/// The tree's leaves are buckets of [`SEG_BUCKET`] consecutive entries.
/// Deletions are lazy: an entry's value is cleared to `-inf` when it is
/// reported or found dead, so tree maxima are upper bounds over live
/// entries and are tightened on the way back up from each visit.
struct SegLayer {
    key_axis: Option<usize>,
    keys: Vec<f64>,
    /// First key of every bucket.
    fences: Vec<f64>,
    slots: Vec<u32>,
    /// Last coordinate per entry, `-inf` once known to be deleted.
    values: Vec<f64>,
    /// Number of tree leaves (buckets, padded to a power of two).
    size: usize,
    /// Heap-ordered maxima, root at 1, leaves at `size..2 * size`.
    max: Vec<f64>,
}

struct InnerLayer {
    axis: usize,
    /// Ascending coordinate `axis` of the entries.
    keys: Vec<f64>,
    slots: Vec<u32>,
    nodes: Vec<TreeNode>,
}

struct TreeNode {
    lo: u32,
    hi: u32,
    kids: Option<(u32, u32)>,
    /// Structure over the remaining coordinates; absent on leaf buckets.
    assoc: Option<Box<Layer>>,
}

fn build_tree(dim: usize, coords: &[f64], n: usize) -> Layer {
    // Presorted lists for every axis that orders a level; the last
    // coordinate only feeds the max trees.
    let lists: Vec<Vec<u32>> = (0..dim.saturating_sub(1).max(1))
        .map(|axis| {
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_unstable_by(|&a, &b| {
                coords[a as usize * dim + axis]
                    .total_cmp(&coords[b as usize * dim + axis])
                    .then(a.cmp(&b))
            });
            order
        })
        .collect();
    let mut side = vec![false; n];
    build_layer(0, lists, coords, dim, &mut side)
}

/// `lists[k]` holds the same slots sorted by coordinate `axis + k`.
fn build_layer(axis: usize, mut lists: Vec<Vec<u32>>, coords: &[f64], dim: usize, side: &mut [bool]) -> Layer {
    let sorted = lists.remove(0);
    if dim == 1 {
        return Layer::Seg(SegLayer::new(None, sorted, coords, dim));
    }
    if axis + 2 == dim {
        return Layer::Seg(SegLayer::new(Some(axis), sorted, coords, dim));
    }
    let keys: Vec<f64> = sorted.iter().map(|&s| coords[s as usize * dim + axis]).collect();
    let mut layer = InnerLayer {
        axis,
        keys,
        slots: sorted,
        nodes: Vec::new(),
    };
    let m = layer.slots.len() as u32;
    layer.build_node(0, m, lists, coords, dim, side);
    Layer::Inner(layer)
}

impl InnerLayer {
    fn build_node(&mut self, lo: u32, hi: u32, rest: Vec<Vec<u32>>, coords: &[f64], dim: usize, side: &mut [bool]) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(TreeNode {
            lo,
            hi,
            kids: None,
            assoc: None,
        });
        if (hi - lo) as usize <= BUCKET {
            return id;
        }
        let mid = lo + (hi - lo) / 2;
        for pos in lo..hi {
            side[self.slots[pos as usize] as usize] = pos >= mid;
        }
        let mut left = Vec::with_capacity(rest.len());
        let mut right = Vec::with_capacity(rest.len());
        for list in &rest {
            let (r, l): (Vec<u32>, Vec<u32>) = list.iter().partition(|&&s| side[s as usize]);
            left.push(l);
            right.push(r);
        }
        let assoc = build_layer(self.axis + 1, rest, coords, dim, side);
        let a = self.build_node(lo, mid, left, coords, dim, side);
        let b = self.build_node(mid, hi, right, coords, dim, side);
        let node = &mut self.nodes[id as usize];
        node.kids = Some((a, b));
        node.assoc = Some(Box::new(assoc));
        id
    }

    fn query(&mut self, ctx: &mut QueryCtx<'_>) -> bool {
        let limit = ctx.lower[self.axis];
        let t = self.keys.partition_point(|&k| k < limit) as u32;
        if t as usize == self.slots.len() {
            return false;
        }
        self.visit(0, t, ctx)
    }

    fn visit(&mut self, id: u32, t: u32, ctx: &mut QueryCtx<'_>) -> bool {
        let TreeNode { lo, hi, kids, .. } = self.nodes[id as usize];
        if hi <= t {
            return false;
        }
        if lo >= t {
            if let Some(assoc) = self.nodes[id as usize].assoc.as_mut() {
                return assoc.query(ctx);
            }
            return self.scan(lo, hi, ctx);
        }
        match kids {
            Some((a, b)) => self.visit(a, t, ctx) || self.visit(b, t, ctx),
            None => self.scan(t, hi, ctx),
        }
    }

    fn scan(&self, from: u32, to: u32, ctx: &mut QueryCtx<'_>) -> bool {
        for &slot in &self.slots[from as usize..to as usize] {
            if ctx.alive[slot as usize] && slot != ctx.exclude && ctx.dominates_from(slot, self.axis + 1) && ctx.report(slot) {
                return true;
            }
        }
        false
    }
}

impl SegLayer {
    fn new(key_axis: Option<usize>, sorted: Vec<u32>, coords: &[f64], dim: usize) -> Self {
        let len = sorted.len();
        let values: Vec<f64> = sorted.iter().map(|&s| coords[s as usize * dim + dim - 1]).collect();
        let size = len.div_ceil(SEG_BUCKET).next_power_of_two();
        let mut max = vec![f64::NEG_INFINITY; 2 * size];
        for (leaf, chunk) in max[size..].iter_mut().zip(values.chunks(SEG_BUCKET)) {
            *leaf = chunk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
        for i in (1..size).rev() {
            max[i] = max[2 * i].max(max[2 * i + 1]);
        }
        let keys: Vec<f64> = match key_axis {
            Some(a) => sorted.iter().map(|&s| coords[s as usize * dim + a]).collect(),
            None => Vec::new(),
        };
        let fences = keys.iter().step_by(SEG_BUCKET).copied().collect();
        SegLayer {
            key_axis,
            keys,
            fences,
            slots: sorted,
            values,
            size,
            max,
        }
    }

    /// First position whose key is at least `limit`.
    fn lower_bound(&self, limit: f64) -> usize {
        let b = self.fences.partition_point(|&k| k < limit);
        if b == 0 {
            return 0;
        }
        let start = (b - 1) * SEG_BUCKET;
        let end = (start + SEG_BUCKET).min(self.keys.len());
        start + self.keys[start..end].partition_point(|&k| k < limit)
    }

    fn query(&mut self, ctx: &mut QueryCtx<'_>) -> bool {
        let t = match self.key_axis {
            Some(a) => self.lower_bound(ctx.lower[a]),
            None => 0,
        };
        if t >= self.slots.len() {
            return false;
        }
        self.visit(1, 0, self.size, t, ctx)
    }

    /// Visits the buckets `lo..hi` below `node`, restricted to entries at
    /// positions `t..`.
    fn visit(&mut self, node: usize, lo: usize, hi: usize, t: usize, ctx: &mut QueryCtx<'_>) -> bool {
        // Padding leaves hold -inf and are never entered.
        if hi * SEG_BUCKET <= t || self.max[node] < ctx.lower[ctx.dim - 1] {
            return false;
        }
        if hi - lo == 1 {
            return self.scan_bucket(node, lo, t, ctx);
        }
        let mid = (lo + hi) / 2;
        let stop = self.visit(2 * node, lo, mid, t, ctx) || self.visit(2 * node + 1, mid, hi, t, ctx);
        self.max[node] = self.max[2 * node].max(self.max[2 * node + 1]);
        stop
    }

    fn scan_bucket(&mut self, node: usize, bucket: usize, t: usize, ctx: &mut QueryCtx<'_>) -> bool {
        let start = bucket * SEG_BUCKET;
        let end = (start + SEG_BUCKET).min(self.values.len());
        let limit = ctx.lower[ctx.dim - 1];
        let mut stop = false;
        for i in start.max(t)..end {
            if self.values[i] < limit {
                continue;
            }
            let slot = self.slots[i];
            if !ctx.alive[slot as usize] {
                self.values[i] = f64::NEG_INFINITY;
                continue;
            }
            if slot == ctx.exclude {
                continue;
            }
            if ctx.report(slot) {
                stop = true;
                break;
            }
            if ctx.remove {
                self.values[i] = f64::NEG_INFINITY;
            }
        }
        self.max[node] = self.values[start..end].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        stop
    }
}

impl Layer {
    fn query(&mut self, ctx: &mut QueryCtx<'_>) -> bool {
        match self {
            Layer::Seg(l) => l.query(ctx),
            Layer::Inner(l) => l.query(ctx),
        }
    }
}
