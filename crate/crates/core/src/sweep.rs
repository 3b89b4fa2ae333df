//! Candidate graph construction.
//!
//! For an orthant sign vector `alpha` and a cone ordinal `i`, a pass maps
//! every point through the matrix of cone `(-alpha, i)`, so that `x` lies in
//! the backward cone of `s` exactly when `x'` dominates `s'`. Points are
//! visited in ascending refined sweep order; each visit removes the
//! dominating set from the index and links the visited point to the member
//! with the largest sweep key, which is its nearest point in that cone.
//!
//! Running every `(alpha, i)` pass on the full point set costs `2^d k_d`
//! passes, about four million at `d = 4`. The [`Schedule::Pruned`] schedule
//! produces the same edges by walking the cone subdivision tree: at an
//! internal node only points that have a neighbour inside the node's region
//! (forwards or backwards) can take part in any pass below it, so the rest
//! are dropped before descending.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cones::{ConeFamily, NodeId};
use crate::dominance::{Backend, DominanceIndex, TransformedPoint};
use crate::error::{Error, Result};
use crate::geometry::{l1_distance, sweep_key, sweep_order, PointSet, SignVector};
use crate::linalg::mat_vec;

/// Relative slack of dominance comparisons in transformed coordinates.
pub const RELATIVE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl CandidateEdge {
    pub fn new(points: &PointSet, u: usize, v: usize) -> Self {
        CandidateEdge {
            u,
            v,
            weight: l1_distance(points.point(u), points.point(v)),
        }
    }

    /// The same edge with `u < v`.
    pub fn normalized(self) -> Self {
        if self.u <= self.v {
            self
        } else {
            CandidateEdge {
                u: self.v,
                v: self.u,
                weight: self.weight,
            }
        }
    }
}

/// One sweep: orthant `alpha`, cone `ordinal`, and the membership matrix of
/// the backward cone `(-alpha, ordinal)`.
#[derive(Clone, Debug)]
pub struct PassConfig {
    pub alpha: SignVector,
    pub ordinal: usize,
    pub matrix: Vec<f64>,
}

impl PassConfig {
    pub fn new(family: &ConeFamily, alpha: SignVector, ordinal: usize) -> Result<Self> {
        if alpha.dim() != family.dim() {
            return Err(Error::DimensionMismatch {
                expected: family.dim(),
                found: alpha.dim(),
            });
        }
        if ordinal >= family.cones_per_orthant() {
            return Err(Error::Config(format!(
                "cone ordinal {ordinal} out of range 0..{}",
                family.cones_per_orthant()
            )));
        }
        Ok(PassConfig {
            alpha,
            ordinal,
            matrix: family.cone(alpha.negate(), ordinal).matrix,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Every `(alpha, i)` pass over every point.
    Exhaustive,
    /// Subdivision-tree descent with point filtering; same edges.
    #[default]
    Pruned,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Exhaustive => "exhaustive",
            Schedule::Pruned => "pruned",
        })
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Schedule::Exhaustive),
            "pruned" => Ok(Schedule::Pruned),
            other => Err(Error::Config(format!("unknown schedule `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub backend: Backend,
    pub schedule: Schedule,
    /// Worker threads for orthant-level parallelism; 1 runs inline.
    pub threads: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            backend: Backend::Tree,
            schedule: Schedule::Pruned,
            threads: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// Sweep passes actually executed.
    pub passes: u64,
    /// Subdivision-tree nodes at which points were filtered.
    pub probes: u64,
    /// Edges emitted before deduplication.
    pub raw_edges: u64,
}

impl SweepStats {
    fn add(&mut self, other: &SweepStats) {
        self.passes += other.passes;
        self.probes += other.probes;
        self.raw_edges += other.raw_edges;
    }
}

#[derive(Clone, Debug)]
pub struct CandidateGraph {
    /// Deduplicated, normalized (`u < v`) and sorted by `(u, v)`.
    pub edges: Vec<CandidateEdge>,
    pub stats: SweepStats,
}

/// Dominance slack for one instance and family.
///
/// Transformed coordinates scale with the largest coordinate magnitude and
/// the largest row norm of any tree matrix, so the slack does too.
pub fn sweep_eps(points: &PointSet, family: &ConeFamily) -> f64 {
    RELATIVE_EPS * points.coordinate_scale() * family.max_row_norm()
}

/// The extracted point with the largest sweep key, ties broken by the
/// refined order.
pub fn nearest_in_extracted(points: &PointSet, s: usize, alpha: SignVector, extracted: &[TransformedPoint]) -> Result<usize> {
    let best = extracted
        .iter()
        .max_by(|a, b| sweep_key(points, a.point_index, alpha).cmp(&sweep_key(points, b.point_index, alpha)))
        .ok_or_else(|| Error::Contract("no extracted points to choose from".into()))?;
    debug_assert!({
        let d = |i: usize| l1_distance(points.point(s), points.point(i));
        let min = extracted.iter().map(|p| d(p.point_index)).fold(f64::INFINITY, f64::min);
        d(best.point_index) - min <= RELATIVE_EPS * points.coordinate_scale()
    });
    Ok(best.point_index)
}

/// A single pass over all points.
pub fn run_pass(points: &PointSet, cfg: &PassConfig, eps: f64, backend: Backend) -> Vec<CandidateEdge> {
    assert_eq!(points.dim(), cfg.alpha.dim());
    let order = sweep_order(points, cfg.alpha);
    let mut raw = Vec::new();
    let mut scratch = PassScratch::default();
    pass_on(points, &order, &cfg.matrix, eps, backend, &mut scratch, &mut raw, |_, _| {});
    raw.into_iter().map(|(s, t)| CandidateEdge::new(points, s as usize, t as usize)).collect()
}

/// [`run_pass`], additionally reporting each visited point together with
/// the point indices extracted for it (possibly none).
pub fn run_pass_traced(
    points: &PointSet,
    cfg: &PassConfig,
    eps: f64,
    backend: Backend,
    mut visit: impl FnMut(usize, &[usize]),
) -> Vec<CandidateEdge> {
    assert_eq!(points.dim(), cfg.alpha.dim());
    let order = sweep_order(points, cfg.alpha);
    let mut raw = Vec::new();
    let mut scratch = PassScratch::default();
    let mut buf = Vec::new();
    pass_on(points, &order, &cfg.matrix, eps, backend, &mut scratch, &mut raw, |s, extracted| {
        buf.clear();
        buf.extend(extracted.iter().map(|&r| order[r as usize] as usize));
        visit(s as usize, &buf);
    });
    raw.into_iter().map(|(s, t)| CandidateEdge::new(points, s as usize, t as usize)).collect()
}

/// All passes of the family, merged and deduplicated.
pub fn build_candidate_graph(points: &PointSet, family: &ConeFamily, opts: &SweepOptions) -> Result<CandidateGraph> {
    if points.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: points.dim(),
        });
    }
    if points.len() < 2 {
        return Ok(CandidateGraph {
            edges: Vec::new(),
            stats: SweepStats::default(),
        });
    }
    let eps = sweep_eps(points, family);
    let alphas: Vec<SignVector> = SignVector::all(family.dim()).collect();
    let per_alpha = |alpha: &SignVector| orthant_edges(points, family, *alpha, eps, opts);
    let results: Vec<(Vec<(u32, u32)>, SweepStats)> = if opts.threads <= 1 {
        alphas.iter().map(per_alpha).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| alphas.par_iter().map(per_alpha).collect())
    };

    let mut stats = SweepStats::default();
    let mut pairs = Vec::with_capacity(results.iter().map(|r| r.0.len()).sum());
    for (edges, s) in results {
        stats.add(&s);
        pairs.extend(edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))));
    }
    pairs.sort_unstable();
    pairs.dedup();
    let edges = pairs
        .into_iter()
        .map(|(u, v)| CandidateEdge::new(points, u as usize, v as usize))
        .collect();
    Ok(CandidateGraph { edges, stats })
}

/// Raw `(s, s'')` pairs of every pass in one orthant.
fn orthant_edges(points: &PointSet, family: &ConeFamily, alpha: SignVector, eps: f64, opts: &SweepOptions) -> (Vec<(u32, u32)>, SweepStats) {
    let order = sweep_order(points, alpha);
    let mut walker = Walker {
        points,
        family,
        backward: alpha.negate(),
        eps,
        probe_eps: 2.0 * family.dim() as f64 * eps,
        backend: opts.backend,
        scratch: PassScratch::default(),
        matrix: vec![0.0; family.dim() * family.dim()],
        edges: Vec::new(),
        stats: SweepStats::default(),
    };
    match opts.schedule {
        Schedule::Exhaustive => walker.leaves_under(family.root(), &order),
        Schedule::Pruned => walker.descend(family.root(), order),
    }
    walker.stats.raw_edges = walker.edges.len() as u64;
    (walker.edges, walker.stats)
}

struct Walker<'a> {
    points: &'a PointSet,
    family: &'a ConeFamily,
    backward: SignVector,
    eps: f64,
    probe_eps: f64,
    backend: Backend,
    scratch: PassScratch,
    matrix: Vec<f64>,
    edges: Vec<(u32, u32)>,
    stats: SweepStats,
}

impl Walker<'_> {
    fn leaves_under(&mut self, node: NodeId, active: &[u32]) {
        for ordinal in self.family.leaf_range(node) {
            let leaf = self.family.leaf_node(ordinal);
            self.family.node_matrix_into(leaf, self.backward, &mut self.matrix);
            pass_on(self.points, active, &self.matrix, self.eps, self.backend, &mut self.scratch, &mut self.edges, |_, _| {});
            self.stats.passes += 1;
        }
    }

    fn descend(&mut self, node: NodeId, mut active: Vec<u32>) {
        if active.len() < 2 {
            return;
        }
        let children = match self.family.children(node) {
            Some(c) if active.len() < self.family.leaf_range(node).len() => c,
            _ => return self.leaves_under(node, &active),
        };
        self.family.node_matrix_into(node, self.backward, &mut self.matrix);
        let keep = self.probe(&active);
        self.stats.probes += 1;
        let mut flags = keep.into_iter();
        active.retain(|_| flags.next().unwrap());
        if active.len() < 2 {
            return;
        }
        self.descend(children[0], active.clone());
        self.descend(children[1], active);
    }

    /// Marks points with another point in their backward or forward region
    /// of the current node. Regions of descendants lie inside it up to
    /// `d * eps` in these coordinates, so `probe_eps` never drops a point a
    /// leaf pass would use.
    fn probe(&mut self, active: &[u32]) -> Vec<bool> {
        let d = self.family.dim();
        let n = active.len();
        let coords = transform(self.points, active, &self.matrix);
        let negated: Vec<f64> = coords.iter().map(|c| -c).collect();
        let slots: Vec<usize> = (0..n).collect();
        let mut backward = DominanceIndex::from_flat(d, coords, slots.clone(), self.backend);
        let mut forward = DominanceIndex::from_flat(d, negated, slots, self.backend);
        let mut q = vec![0.0; d];
        (0..n)
            .map(|r| {
                let me = Some(r as u32);
                q.copy_from_slice(backward.tcoords(r));
                if backward.any_dominating(&q, self.probe_eps, me) {
                    return true;
                }
                q.copy_from_slice(forward.tcoords(r));
                forward.any_dominating(&q, self.probe_eps, me)
            })
            .collect()
    }
}

#[derive(Default)]
struct PassScratch {
    extracted: Vec<u32>,
    query: Vec<f64>,
}

fn transform(points: &PointSet, subset: &[u32], matrix: &[f64]) -> Vec<f64> {
    let d = points.dim();
    let mut coords = vec![0.0; subset.len() * d];
    for (chunk, &p) in coords.chunks_exact_mut(d).zip(subset) {
        mat_vec(matrix, points.point(p as usize), chunk);
    }
    coords
}

/// Sweeps `order` (ascending refined sweep order) against one backward-cone
/// matrix and appends `(s, s'')` pairs. `visit` sees each point with the
/// slots extracted for it.
#[allow(clippy::too_many_arguments)]
fn pass_on(
    points: &PointSet,
    order: &[u32],
    matrix: &[f64],
    eps: f64,
    backend: Backend,
    scratch: &mut PassScratch,
    out: &mut Vec<(u32, u32)>,
    mut visit: impl FnMut(u32, &[u32]),
) {
    let d = points.dim();
    if order.len() < 2 {
        return;
    }
    let coords = transform(points, order, matrix);
    // Slot r holds order[r], so the largest slot is the largest sweep key.
    let mut index = DominanceIndex::from_flat(d, coords, order.iter().map(|&p| p as usize).collect(), backend);
    scratch.query.resize(d, 0.0);
    // Points admitted through the slack sit up to about `d * eps` outside
    // the orthant, which perturbs the distance-key identity by that much.
    let slack = if cfg!(debug_assertions) {
        8.0 * d as f64 * eps + RELATIVE_EPS * points.coordinate_scale()
    } else {
        0.0
    };
    for (r, &s) in order.iter().enumerate() {
        scratch.query.copy_from_slice(index.tcoords(r));
        scratch.extracted.clear();
        index.extract_dominating_into(&scratch.query, eps, Some(r as u32), &mut scratch.extracted);
        visit(s, &scratch.extracted);
        if let Some(&best) = scratch.extracted.iter().max() {
            let nearest = order[best as usize];
            debug_assert!(is_nearest(points, s, nearest, &scratch.extracted, order, slack));
            out.push((s, nearest));
        }
    }
}

fn is_nearest(points: &PointSet, s: u32, chosen: u32, extracted: &[u32], order: &[u32], slack: f64) -> bool {
    let d = |i: u32| l1_distance(points.point(s as usize), points.point(i as usize));
    let min = extracted.iter().map(|&r| d(order[r as usize])).fold(f64::INFINITY, f64::min);
    d(chosen) - min <= slack
}
