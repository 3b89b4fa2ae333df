use crate::cones::{ConeFamily, FamilyKind, DEFAULT_MAX_DIM};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::mst::{kruskal, MstResult};
use crate::sweep::{build_candidate_graph, SweepOptions, SweepStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub family: FamilyKind,
    /// Largest dimension for which a cone family is materialized.
    pub max_dim: usize,
    pub sweep: SweepOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            family: FamilyKind::Yao,
            max_dim: DEFAULT_MAX_DIM,
            sweep: SweepOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub mst: MstResult,
    pub candidate_edges: usize,
    pub stats: SweepStats,
}

/// Minimum spanning tree of distinct points under the `l_1` metric.
pub fn solve(points: &PointSet, opts: &SolveOptions) -> Result<Solution> {
    if points.len() < 2 {
        if points.dim() > 0 {
            check_dim(points.dim(), opts)?;
        }
        return Ok(trivial());
    }
    let family = ConeFamily::of_kind(opts.family, points.dim(), opts.max_dim)?;
    solve_with_family(points, &family, &opts.sweep)
}

/// [`solve`] with a prebuilt family, for callers solving many instances.
pub fn solve_with_family(points: &PointSet, family: &ConeFamily, opts: &SweepOptions) -> Result<Solution> {
    if points.len() < 2 {
        return Ok(trivial());
    }
    let graph = build_candidate_graph(points, family, opts)?;
    let mst = kruskal(points.len(), &graph.edges);
    if mst.components != 1 {
        return Err(Error::Contract(format!(
            "candidate graph split into {} components",
            mst.components
        )));
    }
    Ok(Solution {
        mst,
        candidate_edges: graph.edges.len(),
        stats: graph.stats,
    })
}

// Rejects unsupported dimensions without materializing a valid family.
fn check_dim(dim: usize, opts: &SolveOptions) -> Result<()> {
    match opts.family {
        FamilyKind::Yao if dim <= opts.max_dim => Ok(()),
        FamilyKind::Octant2d if dim == 2 => Ok(()),
        _ => ConeFamily::of_kind(opts.family, dim, opts.max_dim).map(|_| ()),
    }
}

fn trivial() -> Solution {
    Solution {
        mst: MstResult {
            edges: Vec::new(),
            total_weight: 0.0,
            components: 1,
        },
        candidate_edges: 0,
        stats: SweepStats::default(),
    }
}
