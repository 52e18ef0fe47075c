//! Pants cut out by the circle family and their adjacency graph.
//!
//! `P(k, i)` is the region inside `C_k^i` and outside its two children. Its
//! number is `n = ε(i)(2^{k-1} + |i| - 1)`, so `P(1, ±1) = P_{±1}` and the
//! children of `P_n` are `P_{2n}`, `P_{2n+1}` (same sign). The region
//! between `C_1^1` and `C_1^{-1}` is an annulus around `C_0^0`; it joins
//! `P_1` to `P_{-1}` and is recorded as a single edge labelled `C_0^0`.
//!
//! In the shifted naming used for boundary labels the outer circle of a
//! level-1 pants is `C_0^0` and every other circle drops one level, so `P_1`
//! is bounded by `C_0^0`, `C_1^1`, `C_1^2`.

use serde::Serialize;

use super::{CantorError, CircleId, LIST_BUDGET, MAX_LEVEL};
use crate::pants::build_xinfty;
use crate::trivalent::{doubled_tree_isomorphism, IsomorphismResult, TrivalentGraph};

/// `ε(i)(2^{k-1} + |i| - 1)`.
pub fn pants_index(level: u32, index: i64) -> i64 {
    index.signum() * ((1i64 << (level - 1)) + index.abs() - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PantsNode {
    pub n: i64,
    pub level: u32,
    pub index: i64,
    pub outer: CircleId,
    pub inner: [CircleId; 2],
    /// Boundary circles in the shifted naming: outer, then the two inner ones.
    pub labels: [CircleId; 3],
    /// Inner circles lie beyond the truncation level.
    pub stub: bool,
}

impl PantsNode {
    fn new(level: u32, index: i64, k_max: u32) -> Self {
        let outer = CircleId::new(level, index);
        let inner = outer.children();
        let shifted_outer = if level == 1 { CircleId::AXIS } else { CircleId::new(level - 1, index) };
        let labels = [shifted_outer, CircleId::new(level, inner[0].index), CircleId::new(level, inner[1].index)];
        PantsNode { n: pants_index(level, index), level, index, outer, inner, labels, stub: level == k_max }
    }

    /// Boundary curves without a neighbour across them.
    pub fn free_ends(&self) -> usize {
        if self.stub { 2 } else { 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PantsEdge {
    pub a: i64,
    pub b: i64,
    /// The circle shared by the two pants (`C_0^0` for the doubling edge).
    pub circle: CircleId,
    pub doubling: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PantsGraph {
    pub k_max: u32,
    /// Sorted by level, then left to right.
    pub nodes: Vec<PantsNode>,
    pub edges: Vec<PantsEdge>,
}

impl PantsGraph {
    pub fn node(&self, n: i64) -> Option<&PantsNode> {
        if n == 0 {
            return None;
        }
        let level = 64 - n.unsigned_abs().leading_zeros();
        if level > self.k_max {
            return None;
        }
        let index = n.signum() * (n.abs() - (1i64 << (level - 1)) + 1);
        let half = 1i64 << (level - 1);
        let pos = (1usize << level) - 2 + if index < 0 { (half + index) as usize } else { (half + index - 1) as usize };
        self.nodes.get(pos)
    }

    /// Incident edges plus free ends.
    pub fn degree(&self, n: i64) -> usize {
        let edges = self.edges.iter().filter(|e| e.a == n || e.b == n).count();
        edges + self.node(n).map_or(0, PantsNode::free_ends)
    }

    /// Keep pants of level `≤ depth`; the deepest kept level becomes stubs.
    pub fn truncate(&self, depth: u32) -> PantsGraph {
        let depth = depth.min(self.k_max);
        let nodes = self
            .nodes
            .iter()
            .filter(|p| p.level <= depth)
            .map(|p| PantsNode { stub: p.level == depth, ..p.clone() })
            .collect();
        let edges = self.edges.iter().filter(|e| e.doubling || e.circle.level <= depth).copied().collect();
        PantsGraph { k_max: depth, nodes, edges }
    }

    pub fn to_trivalent(&self) -> TrivalentGraph {
        let labels = self.nodes.iter().map(|p| p.n).collect();
        let free = self.nodes.iter().map(PantsNode::free_ends).collect();
        let edges: Vec<(i64, i64)> = self.edges.iter().map(|e| (e.a, e.b)).collect();
        TrivalentGraph::new(labels, &edges, free, Some((1, -1))).expect("pants labels are distinct")
    }
}

/// All pants `P(k, i)`, `1 ≤ k ≤ k_max`; those of level `k_max` are stubs.
pub fn pants_graph(k_max: u32) -> Result<PantsGraph, CantorError> {
    if k_max == 0 || k_max > MAX_LEVEL {
        return Err(CantorError::LevelLimit { level: k_max, max: MAX_LEVEL });
    }
    let count = (1u128 << (k_max + 1)) - 2;
    if count > LIST_BUDGET as u128 {
        return Err(CantorError::TooMany { level: k_max, count, budget: LIST_BUDGET });
    }
    let mut nodes = Vec::with_capacity(count as usize);
    let mut edges = vec![PantsEdge { a: 1, b: -1, circle: CircleId::AXIS, doubling: true }];
    for k in 1..=k_max {
        let half = 1i64 << (k - 1);
        for index in (-half..=-1).chain(1..=half) {
            let node = PantsNode::new(k, index, k_max);
            if k < k_max {
                for child in node.inner {
                    edges.push(PantsEdge { a: node.n, b: pants_index(k + 1, child.index), circle: child, doubling: false });
                }
            }
            nodes.push(node);
        }
    }
    Ok(PantsGraph { k_max, nodes, edges })
}

/// Compare the pants graph, truncated to `depth`, with the gluing graph of
/// the surface `X_depth` built from copies of one pair of pants.
pub fn graph_isomorphic_to_xinfty(g: &PantsGraph, depth: u32) -> IsomorphismResult {
    let ours = g.truncate(depth).to_trivalent();
    let xk = build_xinfty(depth, 1.0).expect("positive generation count and length");
    doubled_tree_isomorphism(&ours, &xk.to_trivalent())
}
