//! Exact minimum spanning trees of point sets under the `l_1` metric.
//!
//! Each orthant around a point is covered by narrow simplicial cones
//! ([`cones`]). For every cone, a sweep over the points links each point to
//! its nearest neighbour inside the cone's backward copy, found with a
//! dominance index ([`dominance`], [`sweep`]). The resulting sparse graph
//! contains a minimum spanning tree, which Kruskal's algorithm extracts
//! ([`mst`]).
//!
//! ```
//! use l1mst::geometry::PointSet;
//! use l1mst::pipeline::{solve, SolveOptions};
//!
//! let points = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
//! let solution = solve(&points, &SolveOptions::default()).unwrap();
//! assert_eq!(solution.mst.total_weight, 2.0);
//! ```

pub mod cones;
pub mod dominance;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mst;
pub mod pipeline;
pub mod sweep;
mod linalg;

pub use error::{Error, Result};
