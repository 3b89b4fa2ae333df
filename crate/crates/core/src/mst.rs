//! Spanning trees: Kruskal over a sparse candidate graph, and a dense
//! `O(n^2)` Prim used as ground truth.

use crate::geometry::{l1_distance, PointSet};
use crate::sweep::CandidateEdge;

#[derive(Clone, Debug)]
pub struct DisjointSetUnion {
    parent: Vec<u32>,
    rank: Vec<u8>,
    sets: usize,
}

impl DisjointSetUnion {
    pub fn new(n: usize) -> Self {
        DisjointSetUnion {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi as u32;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MstResult {
    pub edges: Vec<CandidateEdge>,
    pub total_weight: f64,
    pub components: usize,
}

/// Minimum spanning forest of `n` vertices. Edges are taken in
/// `(weight, min endpoint, max endpoint)` order.
pub fn kruskal(n: usize, edges: &[CandidateEdge]) -> MstResult {
    let mut sorted: Vec<CandidateEdge> = edges.iter().map(|e| e.normalized()).collect();
    for e in &sorted {
        assert!(e.u < n && e.v < n, "edge ({}, {}) out of range for {n} vertices", e.u, e.v);
    }
    sorted.sort_unstable_by(|a, b| a.weight.total_cmp(&b.weight).then(a.u.cmp(&b.u)).then(a.v.cmp(&b.v)));
    let mut dsu = DisjointSetUnion::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    let mut total = 0.0;
    for e in sorted {
        if dsu.union(e.u, e.v) {
            total += e.weight;
            tree.push(e);
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    MstResult {
        edges: tree,
        total_weight: total,
        components: dsu.set_count().max(usize::from(n == 0)),
    }
}

/// Exact MST of the complete `l_1` graph by array-based Prim.
pub fn prim_dense_oracle(points: &PointSet) -> MstResult {
    let n = points.len();
    if n == 0 {
        return MstResult {
            edges: Vec::new(),
            total_weight: 0.0,
            components: 1,
        };
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut link = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut total = 0.0;
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let p = points.point(current);
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let w = l1_distance(p, points.point(v));
            if w < best[v] {
                best[v] = w;
                link[v] = current;
            }
            if next == usize::MAX || best[v] < best[next] {
                next = v;
            }
        }
        in_tree[next] = true;
        total += best[next];
        edges.push(CandidateEdge { u: link[next], v: next, weight: best[next] }.normalized());
        current = next;
    }
    MstResult {
        edges,
        total_weight: total,
        components: 1,
    }
}
