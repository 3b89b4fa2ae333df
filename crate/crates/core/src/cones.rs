//! Yao's covering of `R^d` by narrow simplicial cones.
//!
//! Each orthant is split into `k_d` simplicial cones. A cone with unit
//! generators `g_1..g_d` (the columns of `E`) is described by its
//! membership matrix `A = E^-1`: a point `x` lies in the cone at apex `s`
//! iff `A (x - s) >= 0` componentwise.
//!
//! Cones of the positive orthant are produced by repeated bisection: the
//! pair of generators with the widest angle is split by its normalized
//! midpoint direction, giving two children (the first replaces the lower
//! generator of the pair, the second the higher one). A cone stops
//! splitting once every generator pair is closer than
//! `arcsin(1 / (2 d^{3/2}))`. Other orthants are sign flips of the
//! positive one, so cone `(-alpha, i)` has matrix `-A(alpha, i)`.
//!
//! Children's matrices are updated from their parent's in `O(d)` instead of
//! being re-inverted: replacing `g_i` by `(g_i + g_j) / l` multiplies row
//! `i` of `A` by `l` and subtracts the old row `i` from row `j`.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{l1_distance, SignVector};
use crate::linalg::{angle_between, dot, invert, norm};

/// Largest dimension [`ConeFamily::build`] materializes without an override.
///
/// `k_4` is about 2.5e5 cones per orthant; `k_5` exceeds 1.2e8 and no
/// longer fits in memory. Larger dimensions can still be enumerated with
/// [`for_each_base_cone`].
pub const DEFAULT_MAX_DIM: usize = 4;

/// Generator pairs whose cosines differ by less than this count as equally
/// wide, so the first such pair in index order is split.
const TIE_TOLERANCE: f64 = 1e-12;

const MAX_DEPTH: usize = 96;

/// `arcsin(1 / (2 d^{3/2}))`, in radians.
pub fn yao_angle_threshold(dim: usize) -> f64 {
    (1.0 / (2.0 * (dim as f64).powf(1.5))).asin()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Bisect until the angle criterion holds.
    Yao,
    /// The eight 45-degree half-quadrants of the plane.
    Octant2d,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Yao => "yao",
            FamilyKind::Octant2d => "octant2d",
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum StopRule {
    /// Leaf once every generator pair has cosine above this value.
    CosineAbove(f64),
    Depth(usize),
}

impl StopRule {
    fn for_kind(kind: FamilyKind, dim: usize) -> Self {
        match kind {
            FamilyKind::Yao => StopRule::CosineAbove(yao_angle_threshold(dim).cos()),
            FamilyKind::Octant2d => StopRule::Depth(1),
        }
    }

    /// Returns the generator pair to bisect, or `None` for a leaf.
    fn split(&self, dim: usize, gens: &[f64], depth: usize) -> Option<(usize, usize)> {
        if dim < 2 {
            return None;
        }
        let (mut best, mut pair) = (f64::INFINITY, (0, 1));
        for i in 0..dim {
            for j in i + 1..dim {
                let c = dot(&gens[i * dim..(i + 1) * dim], &gens[j * dim..(j + 1) * dim]);
                if c < best - TIE_TOLERANCE {
                    best = c;
                    pair = (i, j);
                }
            }
        }
        let stop = match *self {
            StopRule::CosineAbove(limit) => best > limit,
            StopRule::Depth(limit) => depth >= limit,
        };
        if stop {
            None
        } else {
            assert!(depth < MAX_DEPTH, "cone subdivision did not converge");
            Some(pair)
        }
    }
}

/// A node of the subdivision tree as seen by a visitor.
pub struct NodeEvent<'a> {
    /// Preorder index; leaves appear in ordinal order.
    pub id: u64,
    pub parent: Option<(u64, usize)>,
    pub depth: usize,
    /// Row `j` is generator `j` (unit length).
    pub generators: &'a [f64],
    /// Row-major `A = E^-1`.
    pub matrix: &'a [f64],
    pub is_leaf: bool,
}

/// Depth-first walk over the positive-orthant subdivision tree.
///
/// Frame `k` of `frames` holds the generators and matrix of the node at
/// depth `k` on the current path; a child is derived from its parent's
/// frame in place.
fn walk(dim: usize, rule: StopRule, visit: &mut dyn FnMut(&NodeEvent<'_>)) {
    struct Open {
        id: u64,
        pair: (usize, usize),
        next_child: usize,
        len: f64,
    }

    let dd = dim * dim;
    let stride = 2 * dd;
    let mut frames = vec![0.0; stride * (MAX_DEPTH + 2)];
    let mut mids = vec![0.0; dim * (MAX_DEPTH + 2)];
    for k in 0..dim {
        frames[k * dim + k] = 1.0;
        frames[dd + k * dim + k] = 1.0;
    }
    let mut next_id = 0u64;
    let mut path: Vec<Open> = Vec::with_capacity(MAX_DEPTH + 1);

    // Reports the node in frame `depth` and opens it if it splits.
    let mut enter = |depth: usize, parent: Option<(u64, usize)>, frames: &[f64], mids: &mut [f64], path: &mut Vec<Open>| {
        let frame = &frames[depth * stride..(depth + 1) * stride];
        let (gens, matrix) = frame.split_at(dd);
        let id = next_id;
        next_id += 1;
        let split = rule.split(dim, gens, depth);
        visit(&NodeEvent {
            id,
            parent,
            depth,
            generators: gens,
            matrix,
            is_leaf: split.is_none(),
        });
        if let Some((i, j)) = split {
            let mid = &mut mids[depth * dim..(depth + 1) * dim];
            for (k, m) in mid.iter_mut().enumerate() {
                *m = gens[i * dim + k] + gens[j * dim + k];
            }
            let len = norm(mid);
            for m in mid.iter_mut() {
                *m /= len;
            }
            path.push(Open {
                id,
                pair: (i, j),
                next_child: 0,
                len,
            });
        }
    };

    enter(0, None, &frames, &mut mids, &mut path);
    while let Some(top) = path.last_mut() {
        if top.next_child == 2 {
            path.pop();
            continue;
        }
        let slot = top.next_child;
        top.next_child += 1;
        let (i, j) = top.pair;
        let (len, parent_id) = (top.len, top.id);
        let depth = path.len() - 1;
        let (replaced, other) = if slot == 0 { (i, j) } else { (j, i) };

        let (head, tail) = frames.split_at_mut((depth + 1) * stride);
        let parent = &head[depth * stride..];
        let child = &mut tail[..stride];
        child.copy_from_slice(parent);
        let (g, a) = child.split_at_mut(dd);
        g[replaced * dim..(replaced + 1) * dim].copy_from_slice(&mids[depth * dim..(depth + 1) * dim]);
        let pa = &parent[dd..];
        for c in 0..dim {
            let old = pa[replaced * dim + c];
            a[replaced * dim + c] = old * len;
            a[other * dim + c] = pa[other * dim + c] - old;
        }
        enter(depth + 1, Some((parent_id, slot)), &frames, &mut mids, &mut path);
    }
}

/// Visits every leaf cone of the positive orthant without storing the family.
///
/// The callback receives the generators (row `j` is generator `j`) and the
/// membership matrix of each leaf in ordinal order.
pub fn for_each_base_cone(dim: usize, kind: FamilyKind, mut f: impl FnMut(&[f64], &[f64])) {
    walk(dim, StopRule::for_kind(kind, dim), &mut |ev| {
        if ev.is_leaf {
            f(ev.generators, ev.matrix);
        }
    });
}

/// One simplicial cone `R(alpha, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    pub alpha: SignVector,
    pub ordinal: usize,
    /// Row-major `d x d` membership matrix.
    pub matrix: Vec<f64>,
    /// Row `j` holds generator `j`.
    pub generators: Vec<f64>,
}

impl Cone {
    /// Builds a cone from explicit generators by inverting the generator
    /// matrix.
    pub fn from_generators(alpha: SignVector, ordinal: usize, generators: &[Vec<f64>]) -> Result<Cone> {
        let d = alpha.dim();
        if generators.len() != d || generators.iter().any(|g| g.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: generators.len(),
            });
        }
        let mut columns = vec![0.0; d * d];
        for (j, g) in generators.iter().enumerate() {
            for r in 0..d {
                columns[r * d + j] = g[r];
            }
        }
        let matrix = invert(&columns, d)
            .ok_or_else(|| Error::Config("generators are linearly dependent".into()))?;
        Ok(Cone {
            alpha,
            ordinal,
            matrix,
            generators: generators.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let d = self.dim();
        &self.matrix[r * d..(r + 1) * d]
    }

    pub fn generator(&self, j: usize) -> &[f64] {
        let d = self.dim();
        &self.generators[j * d..(j + 1) * d]
    }

    /// `<A_r, x - apex> >= -eps` for every row.
    pub fn contains(&self, apex: &[f64], x: &[f64], eps: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| {
            let row = self.row(r);
            let v: f64 = (0..d).map(|c| row[c] * (x[c] - apex[c])).sum();
            v >= -eps
        })
    }

    /// [`contains`](Self::contains) with `eps = 1e-9 * max(1, |x - apex|_inf)`.
    pub fn contains_default(&self, apex: &[f64], x: &[f64]) -> bool {
        let spread = x
            .iter()
            .zip(apex)
            .fold(1.0_f64, |m, (a, b)| m.max((a - b).abs()));
        self.contains(apex, x, 1e-9 * spread)
    }

    pub fn max_generator_angle(&self) -> f64 {
        max_pair_angle(&self.generators, self.dim())
    }

    /// Largest entry of `|A E - I|`.
    pub fn identity_residual(&self) -> f64 {
        identity_residual(&self.matrix, &self.generators, self.dim())
    }
}

pub(crate) fn max_pair_angle(gens: &[f64], d: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in i + 1..d {
            worst = worst.max(angle_between(&gens[i * d..(i + 1) * d], &gens[j * d..(j + 1) * d]));
        }
    }
    worst
}

/// Largest entry of `|A E - I|` where `E` has the generators as columns.
pub(crate) fn identity_residual(matrix: &[f64], gens: &[f64], d: usize) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..d {
        for j in 0..d {
            let v = dot(&matrix[r * d..(r + 1) * d], &gens[j * d..(j + 1) * d]);
            let target = if r == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

/// Index of a node in a family's positive-orthant subdivision tree.
pub type NodeId = u32;

#[derive(Clone, Copy, Debug)]
struct TreeNode {
    children: Option<[NodeId; 2]>,
    first_leaf: u32,
    leaf_count: u32,
}

/// All cones for one dimension: `k` cones in each of the `2^d` orthants.
///
/// Only the positive orthant's subdivision tree is stored (internal nodes
/// included); other orthants are derived by sign flips on access.
#[derive(Clone, Debug)]
pub struct ConeFamily {
    dim: usize,
    kind: FamilyKind,
    nodes: Vec<TreeNode>,
    gens: Vec<f64>,
    mats: Vec<f64>,
    leaves: Vec<NodeId>,
    max_row_norm: f64,
}

impl ConeFamily {
    /// The Yao family for `dim` in `1..=DEFAULT_MAX_DIM`.
    pub fn build(dim: usize) -> Result<Self> {
        Self::build_with_limit(dim, DEFAULT_MAX_DIM)
    }

    /// The Yao family with an explicit dimension limit.
    pub fn build_with_limit(dim: usize, max_dim: usize) -> Result<Self> {
        if dim == 0 || dim > max_dim || dim > SignVector::MAX_DIM {
            return Err(Error::Config(format!(
                "dimension {dim} outside supported range 1..={max_dim}"
            )));
        }
        Ok(Self::materialize(dim, FamilyKind::Yao))
    }

    /// The eight half-quadrant cones of the plane (`k = 2`).
    pub fn octant_2d() -> Self {
        Self::materialize(2, FamilyKind::Octant2d)
    }

    pub fn of_kind(kind: FamilyKind, dim: usize, max_dim: usize) -> Result<Self> {
        match kind {
            FamilyKind::Yao => Self::build_with_limit(dim, max_dim),
            FamilyKind::Octant2d if dim == 2 => Ok(Self::octant_2d()),
            FamilyKind::Octant2d => Err(Error::Config(format!(
                "octant2d family requires dimension 2, got {dim}"
            ))),
        }
    }

    fn materialize(dim: usize, kind: FamilyKind) -> Self {
        let dd = dim * dim;
        let mut nodes: Vec<TreeNode> = Vec::new();
        let mut gens = Vec::new();
        let mut mats = Vec::new();
        let mut leaves = Vec::new();
        walk(dim, StopRule::for_kind(kind, dim), &mut |ev| {
            let id = ev.id as NodeId;
            debug_assert_eq!(id as usize, nodes.len());
            if let Some((parent, slot)) = ev.parent {
                let p = &mut nodes[parent as usize];
                let ch = p.children.get_or_insert([NodeId::MAX; 2]);
                ch[slot] = id;
            }
            let first_leaf = leaves.len() as u32;
            if ev.is_leaf {
                leaves.push(id);
            }
            nodes.push(TreeNode {
                children: None,
                first_leaf,
                leaf_count: u32::from(ev.is_leaf),
            });
            gens.extend_from_slice(ev.generators);
            mats.extend_from_slice(ev.matrix);
        });
        // Children always follow their parent in preorder.
        for id in (0..nodes.len()).rev() {
            if let Some([a, b]) = nodes[id].children {
                let count = nodes[a as usize].leaf_count + nodes[b as usize].leaf_count;
                nodes[id].leaf_count = count;
                nodes[id].first_leaf = nodes[a as usize].first_leaf;
            }
        }
        let max_row_norm = mats.chunks_exact(dim).map(norm).fold(1.0_f64, f64::max);
        debug_assert_eq!(gens.len(), nodes.len() * dd);
        ConeFamily {
            dim,
            kind,
            nodes,
            gens,
            mats,
            leaves,
            max_row_norm,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// `k_d`, the number of cones per orthant.
    pub fn cones_per_orthant(&self) -> usize {
        self.leaves.len()
    }

    pub fn total_cones(&self) -> usize {
        self.leaves.len() << self.dim
    }

    /// Largest Euclidean row norm over every node matrix of the tree.
    pub fn max_row_norm(&self) -> f64 {
        self.max_row_norm
    }

    pub fn cone(&self, alpha: SignVector, ordinal: usize) -> Cone {
        assert_eq!(alpha.dim(), self.dim);
        let node = self.leaves[ordinal];
        let d = self.dim;
        let mut matrix = vec![0.0; d * d];
        self.node_matrix_into(node, alpha, &mut matrix);
        let mut generators = self.node_generators(node).to_vec();
        for (k, g) in generators.iter_mut().enumerate() {
            *g = *g * alpha.sign(k % d) + 0.0;
        }
        Cone {
            alpha,
            ordinal,
            matrix,
            generators,
        }
    }

    /// Every cone, grouped by orthant in [`SignVector::all`] order.
    pub fn cones(&self) -> impl Iterator<Item = Cone> + '_ {
        SignVector::all(self.dim)
            .flat_map(move |alpha| (0..self.cones_per_orthant()).map(move |i| self.cone(alpha, i)))
    }

    // --- subdivision tree access, positive-orthant node ids ---

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn children(&self, node: NodeId) -> Option<[NodeId; 2]> {
        self.nodes[node as usize].children
    }

    /// Ordinals of the leaves below `node`.
    pub fn leaf_range(&self, node: NodeId) -> Range<usize> {
        let n = &self.nodes[node as usize];
        n.first_leaf as usize..(n.first_leaf + n.leaf_count) as usize
    }

    pub fn leaf_node(&self, ordinal: usize) -> NodeId {
        self.leaves[ordinal]
    }

    pub fn node_generators(&self, node: NodeId) -> &[f64] {
        let dd = self.dim * self.dim;
        &self.gens[node as usize * dd..(node as usize + 1) * dd]
    }

    /// Writes the membership matrix of `node` mapped into orthant `alpha`,
    /// i.e. `A_node * diag(alpha)`.
    pub fn node_matrix_into(&self, node: NodeId, alpha: SignVector, out: &mut [f64]) {
        let d = self.dim;
        let dd = d * d;
        let src = &self.mats[node as usize * dd..(node as usize + 1) * dd];
        for (k, (o, s)) in out.iter_mut().zip(src).enumerate() {
            *o = s * alpha.sign(k % d) + 0.0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProximityReport {
    pub trials: usize,
    /// Minimum over trials of `max(|p|, |q|) - |p - q|`.
    pub worst_margin: f64,
    pub passed: bool,
}

/// Tolerance on the proximity margin.
pub const PROXIMITY_TOLERANCE: f64 = 1e-9;

/// Samples point pairs `p, q` in the cone (apex at the origin) as
/// non-negative combinations of its generators and checks
/// `|p - q|_1 <= max(|p|_1, |q|_1)`.
///
/// Sparse combinations (single generators and generator pairs) are mixed in
/// with dense ones; for convex regions the worst case sits at generators.
pub fn validate_proximity(cone: &Cone, trials: usize, seed: u64) -> ProximityReport {
    let d = cone.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![0.0; d];
    let mut q = vec![0.0; d];
    let origin = vec![0.0; d];
    let mut worst = f64::INFINITY;
    for t in 0..trials.max(1) {
        sample_combination(cone, t % 4, &mut rng, &mut p);
        if t == 0 {
            q.copy_from_slice(&p);
        } else {
            sample_combination(cone, (t / 4) % 4, &mut rng, &mut q);
        }
        let margin = l1_distance(&p, &origin).max(l1_distance(&q, &origin)) - l1_distance(&p, &q);
        worst = worst.min(margin);
    }
    ProximityReport {
        trials: trials.max(1),
        worst_margin: worst,
        passed: worst >= -PROXIMITY_TOLERANCE,
    }
}

fn sample_combination(cone: &Cone, style: usize, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let d = cone.dim();
    out.iter_mut().for_each(|x| *x = 0.0);
    let scale: f64 = rng.gen_range(0.01..=1.0);
    let mut add = |j: usize, w: f64| {
        for (o, g) in out.iter_mut().zip(cone.generator(j)) {
            *o += w * g;
        }
    };
    match style {
        0 => {
            let j = rng.gen_range(0..d);
            add(j, scale);
        }
        1 => {
            let (a, b) = (rng.gen_range(0..d), rng.gen_range(0..d));
            let w: f64 = rng.gen();
            add(a, scale * w);
            add(b, scale * (1.0 - w));
        }
        _ => {
            for j in 0..d {
                let w: f64 = rng.gen();
                add(j, scale * w);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub trials: usize,
    pub uncovered: usize,
    /// Up to five directions not contained in any cone.
    pub examples: Vec<Vec<f64>>,
}

impl CoverageReport {
    pub fn passed(&self) -> bool {
        self.uncovered == 0
    }
}

fn sample_direction(rng: &mut ChaCha8Rng, t: usize, out: &mut [f64]) {
    loop {
        for x in out.iter_mut() {
            *x = if t.is_multiple_of(5) {
                // lattice directions land on cone boundaries
                f64::from(rng.gen_range(-2i32..=2))
            } else {
                rng.gen_range(-1.0..=1.0)
            };
        }
        if out.iter().any(|&x| x != 0.0) {
            return;
        }
    }
}

/// Checks that random directions each fall into at least one of `cones`
/// (apex at the origin, default tolerance).
pub fn validate_coverage_cones(dim: usize, cones: &[Cone], trials: usize, seed: u64) -> CoverageReport {
    let origin = vec![0.0; dim];
    check_directions(dim, trials, seed, |x| {
        cones.iter().any(|c| c.contains_default(&origin, x))
    })
}

/// Coverage check for a whole family. Small families are scanned cone by
/// cone; large ones descend the subdivision tree to the candidate leaves and
/// test those with [`Cone::contains_default`].
pub fn validate_coverage(family: &ConeFamily, trials: usize, seed: u64) -> CoverageReport {
    if family.total_cones() <= 4096 {
        let cones: Vec<Cone> = family.cones().collect();
        return validate_coverage_cones(family.dim(), &cones, trials, seed);
    }
    let d = family.dim();
    let origin = vec![0.0; d];
    let mut mat = vec![0.0; d * d];
    let mut stack = Vec::new();
    check_directions(d, trials, seed, |x| {
        let mask = x
            .iter()
            .enumerate()
            .fold(0u32, |m, (k, &v)| if v < 0.0 { m | 1 << k } else { m });
        let alpha = SignVector::from_mask(d, mask);
        let spread = x.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        stack.clear();
        stack.push(family.root());
        while let Some(node) = stack.pop() {
            family.node_matrix_into(node, alpha, &mut mat);
            let inside = (0..d).all(|r| dot(&mat[r * d..(r + 1) * d], x) >= -1e-9 * spread);
            if !inside {
                continue;
            }
            match family.children(node) {
                Some([a, b]) => {
                    stack.push(b);
                    stack.push(a);
                }
                None => {
                    let ordinal = family.leaf_range(node).start;
                    if family.cone(alpha, ordinal).contains_default(&origin, x) {
                        return true;
                    }
                }
            }
        }
        false
    })
}

fn check_directions(
    dim: usize,
    trials: usize,
    seed: u64,
    mut covered: impl FnMut(&[f64]) -> bool,
) -> CoverageReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; dim];
    let mut report = CoverageReport {
        trials,
        uncovered: 0,
        examples: Vec::new(),
    };
    for t in 0..trials {
        sample_direction(&mut rng, t, &mut x);
        if !covered(&x) {
            report.uncovered += 1;
            if report.examples.len() < 5 {
                report.examples.push(x.clone());
            }
        }
    }
    report
}

/// Per-cone entry of the JSON cone dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeRecord {
    pub alpha: Vec<i32>,
    pub ordinal: usize,
    pub matrix: Vec<Vec<f64>>,
    pub generators: Vec<Vec<f64>>,
}

impl From<&Cone> for ConeRecord {
    fn from(c: &Cone) -> Self {
        let d = c.dim();
        ConeRecord {
            alpha: c.alpha.signs(),
            ordinal: c.ordinal,
            matrix: (0..d).map(|r| c.row(r).to_vec()).collect(),
            generators: (0..d).map(|j| c.generator(j).to_vec()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    /// Proximity check of every cone, aggregated.
    pub proximity: ProximityReport,
    pub proximity_failures: usize,
    pub coverage: CoverageReport,
}

/// JSON document written by the `cones` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeDump {
    pub d: usize,
    pub k: usize,
    pub family: FamilyKind,
    pub cones: Vec<ConeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSummary>,
}

impl ConeDump {
    pub fn new(family: &ConeFamily) -> Self {
        ConeDump {
            d: family.dim(),
            k: family.cones_per_orthant(),
            family: family.kind(),
            cones: family.cones().map(|c| ConeRecord::from(&c)).collect(),
            validation: None,
        }
    }
}

/// Runs both validators over a family.
pub fn validate_family(family: &ConeFamily, trials: usize, seed: u64) -> ValidationSummary {
    let mut worst = ProximityReport {
        trials: 0,
        worst_margin: f64::INFINITY,
        passed: true,
    };
    let mut failures = 0;
    for (n, cone) in family.cones().enumerate() {
        let r = validate_proximity(&cone, trials, seed.wrapping_add(n as u64));
        worst.trials += r.trials;
        worst.worst_margin = worst.worst_margin.min(r.worst_margin);
        if !r.passed {
            failures += 1;
            worst.passed = false;
        }
    }
    ValidationSummary {
        proximity: worst,
        proximity_failures: failures,
        coverage: validate_coverage(family, trials, seed),
    }
}
