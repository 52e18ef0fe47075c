//! Finite trivalent graphs with free edge ends, and an isomorphism test for
//! "doubled trees": graphs that fall apart into two rooted trees when one
//! distinguished edge is removed.
//!
//! The test compares AHU canonical forms of the two halves and, when they
//! agree, returns an explicit node bijection that is re-checked edge by edge.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) refers to a missing node")]
    MissingNode(i64, i64),
    #[error("duplicate node label {0}")]
    DuplicateLabel(i64),
    #[error("self-loop at node {0}")]
    SelfLoop(i64),
}

/// Undirected multigraph over labelled nodes. Each node also carries a count
/// of free (unglued) edge ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivalentGraph {
    labels: Vec<i64>,
    index: HashMap<i64, usize>,
    adj: Vec<Vec<usize>>,
    free_ends: Vec<usize>,
    distinguished: Option<(usize, usize)>,
}

impl TrivalentGraph {
    /// `edges` and `distinguished` are given by label; `free_ends` is a
    /// per-node count aligned with `labels`.
    pub fn new(
        labels: Vec<i64>,
        edges: &[(i64, i64)],
        free_ends: Vec<usize>,
        distinguished: Option<(i64, i64)>,
    ) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            if index.insert(l, i).is_some() {
                return Err(GraphError::DuplicateLabel(l));
            }
        }
        let mut adj = vec![Vec::new(); labels.len()];
        for &(a, b) in edges {
            let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) else {
                return Err(GraphError::MissingNode(a, b));
            };
            if ia == ib {
                return Err(GraphError::SelfLoop(a));
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        let distinguished = match distinguished {
            Some((a, b)) => match (index.get(&a), index.get(&b)) {
                (Some(&ia), Some(&ib)) => Some((ia, ib)),
                _ => return Err(GraphError::MissingNode(a, b)),
            },
            None => None,
        };
        let mut free_ends = free_ends;
        free_ends.resize(labels.len(), 0);
        Ok(TrivalentGraph { labels, index, adj, free_ends, distinguished })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn distinguished(&self) -> Option<(i64, i64)> {
        self.distinguished.map(|(a, b)| (self.labels[a], self.labels[b]))
    }

    /// Incident edges plus free ends.
    pub fn degree(&self, label: i64) -> Option<usize> {
        self.index.get(&label).map(|&i| self.adj[i].len() + self.free_ends[i])
    }

    pub fn neighbors(&self, label: i64) -> Vec<i64> {
        self.index.get(&label).map(|&i| self.adj[i].iter().map(|&j| self.labels[j]).collect()).unwrap_or_default()
    }

    pub fn has_edge(&self, a: i64, b: i64) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&ia), Some(&ib)) => self.adj[ia].contains(&ib),
            _ => false,
        }
    }

    /// Every node has degree three, counting free ends.
    pub fn is_trivalent(&self) -> bool {
        (0..self.labels.len()).all(|i| self.adj[i].len() + self.free_ends[i] == 3)
    }

    pub fn is_connected(&self) -> bool {
        if self.labels.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.labels.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.labels.len()
    }

    /// Remove one copy of the edge `a – b`; the endpoints gain no free ends.
    pub fn remove_edge(&mut self, a: i64, b: i64) -> bool {
        let (Some(&ia), Some(&ib)) = (self.index.get(&a), self.index.get(&b)) else {
            return false;
        };
        let Some(pa) = self.adj[ia].iter().position(|&x| x == ib) else {
            return false;
        };
        self.adj[ia].swap_remove(pa);
        let pb = self.adj[ib].iter().position(|&x| x == ia).expect("symmetric adjacency");
        self.adj[ib].swap_remove(pb);
        true
    }

    fn sorted_degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.labels.len()).map(|i| self.adj[i].len() + self.free_ends[i]).collect();
        d.sort_unstable();
        d
    }

    /// BFS order and parent links of the tree hanging from `root` once the
    /// distinguished edge to `other` is cut, or a reason it is not a tree.
    fn half_tree(&self, root: usize, other: usize) -> Result<Half, String> {
        let mut order = vec![root];
        let mut parent = HashMap::new();
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            // skip one copy of the edge back to the parent (or across the cut)
            let mut back = if v == root { Some(other) } else { parent.get(&v).copied() };
            for &w in &self.adj[v] {
                if back == Some(w) {
                    back = None;
                    continue;
                }
                if w == root || parent.contains_key(&w) {
                    return Err(format!("cycle through node {}", self.labels[w]));
                }
                parent.insert(w, v);
                order.push(w);
            }
        }
        Ok(Half { order, parent })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Why two graphs are not isomorphic (as doubled trees).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    NodeCount { left: usize, right: usize },
    EdgeCount { left: usize, right: usize },
    DegreeDefect { side: Side, node: i64, degree: usize },
    DegreeSequence { left: Vec<usize>, right: Vec<usize> },
    NoDistinguishedEdge { side: Side },
    NotDoubledTree { side: Side, reason: String },
    HalfShape { left_halves: (u32, u32), right_halves: (u32, u32) },
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::NodeCount { left, right } => write!(f, "node counts differ: {left} vs {right}"),
            Counterexample::EdgeCount { left, right } => write!(f, "edge counts differ: {left} vs {right}"),
            Counterexample::DegreeDefect { side, node, degree } => {
                write!(f, "{side:?} graph: node {node} has degree {degree}, expected 3")
            }
            Counterexample::DegreeSequence { .. } => write!(f, "degree sequences differ"),
            Counterexample::NoDistinguishedEdge { side } => write!(f, "{side:?} graph has no distinguished edge"),
            Counterexample::NotDoubledTree { side, reason } => write!(f, "{side:?} graph is not a doubled tree: {reason}"),
            Counterexample::HalfShape { .. } => write!(f, "rooted halves have different canonical forms"),
        }
    }
}

/// Node bijection `left label → right label`, sorted by left label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isomorphism {
    pub pairs: Vec<(i64, i64)>,
}

impl Isomorphism {
    pub fn image(&self, left: i64) -> Option<i64> {
        self.pairs.binary_search_by_key(&left, |p| p.0).ok().map(|i| self.pairs[i].1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum IsomorphismResult {
    Isomorphic(Isomorphism),
    NotIsomorphic(Counterexample),
}

impl IsomorphismResult {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsomorphismResult::Isomorphic(_))
    }
}

/// AHU canonical ids shared between graphs.
#[derive(Default)]
struct Canon {
    table: BTreeMap<(usize, Vec<u32>), u32>,
}

impl Canon {
    /// Canonical id for every node of the half rooted at `order[0]`.
    fn label(&mut self, g: &TrivalentGraph, order: &[usize], parent: &HashMap<usize, usize>) -> HashMap<usize, u32> {
        let mut ids = HashMap::with_capacity(order.len());
        let mut kids: HashMap<usize, Vec<u32>> = HashMap::new();
        for &v in order.iter().rev() {
            let mut k = kids.remove(&v).unwrap_or_default();
            k.sort_unstable();
            let next = self.table.len() as u32;
            let id = *self.table.entry((g.free_ends[v], k)).or_insert(next);
            ids.insert(v, id);
            if let Some(&p) = parent.get(&v) {
                kids.entry(p).or_default().push(id);
            }
        }
        ids
    }
}

struct Half {
    order: Vec<usize>,
    parent: HashMap<usize, usize>,
}

fn split(g: &TrivalentGraph, side: Side) -> Result<(Half, Half), Counterexample> {
    let (a, b) = g.distinguished.ok_or(Counterexample::NoDistinguishedEdge { side })?;
    let not_tree = |reason: String| Counterexample::NotDoubledTree { side, reason };
    let ha = g.half_tree(a, b).map_err(not_tree)?;
    let hb = g.half_tree(b, a).map_err(not_tree)?;
    if ha.order.len() + hb.order.len() != g.node_count() {
        return Err(not_tree(format!("halves cover {} of {} nodes", ha.order.len() + hb.order.len(), g.node_count())));
    }
    Ok((ha, hb))
}

fn children(g: &TrivalentGraph, half: &Half, v: usize) -> Vec<usize> {
    g.adj[v].iter().copied().filter(|w| half.parent.get(w) == Some(&v)).collect()
}

/// Decide whether two doubled trees are isomorphic by a map that sends the
/// distinguished edge to the distinguished edge.
pub fn doubled_tree_isomorphism(left: &TrivalentGraph, right: &TrivalentGraph) -> IsomorphismResult {
    match find_isomorphism(left, right) {
        Ok(iso) => IsomorphismResult::Isomorphic(iso),
        Err(c) => IsomorphismResult::NotIsomorphic(c),
    }
}

fn find_isomorphism(left: &TrivalentGraph, right: &TrivalentGraph) -> Result<Isomorphism, Counterexample> {
    if left.node_count() != right.node_count() {
        return Err(Counterexample::NodeCount { left: left.node_count(), right: right.node_count() });
    }
    for (side, g) in [(Side::Left, left), (Side::Right, right)] {
        for (i, &l) in g.labels.iter().enumerate() {
            let degree = g.adj[i].len() + g.free_ends[i];
            if degree != 3 {
                return Err(Counterexample::DegreeDefect { side, node: l, degree });
            }
        }
    }
    if left.edge_count() != right.edge_count() {
        return Err(Counterexample::EdgeCount { left: left.edge_count(), right: right.edge_count() });
    }
    let (dl, dr) = (left.sorted_degrees(), right.sorted_degrees());
    if dl != dr {
        return Err(Counterexample::DegreeSequence { left: dl, right: dr });
    }
    let (la, lb) = split(left, Side::Left)?;
    let (ra, rb) = split(right, Side::Right)?;
    let mut canon = Canon::default();
    let ids = [
        canon.label(left, &la.order, &la.parent),
        canon.label(left, &lb.order, &lb.parent),
        canon.label(right, &ra.order, &ra.parent),
        canon.label(right, &rb.order, &rb.parent),
    ];
    let root = |h: &Half, i: usize| ids[i][&h.order[0]];
    let (l0, l1, r0, r1) = (root(&la, 0), root(&lb, 1), root(&ra, 2), root(&rb, 3));
    let mut pairs = Vec::with_capacity(left.node_count());
    if (l0, l1) == (r0, r1) {
        match_subtrees(left, right, &la, &ra, &ids[0], &ids[2], la.order[0], ra.order[0], &mut pairs);
        match_subtrees(left, right, &lb, &rb, &ids[1], &ids[3], lb.order[0], rb.order[0], &mut pairs);
    } else if (l0, l1) == (r1, r0) {
        match_subtrees(left, right, &la, &rb, &ids[0], &ids[3], la.order[0], rb.order[0], &mut pairs);
        match_subtrees(left, right, &lb, &ra, &ids[1], &ids[2], lb.order[0], ra.order[0], &mut pairs);
    } else {
        return Err(Counterexample::HalfShape { left_halves: (l0, l1), right_halves: (r0, r1) });
    }
    pairs.sort_unstable();
    let iso = Isomorphism { pairs };
    debug_assert!(verify(left, right, &iso));
    Ok(iso)
}

#[allow(clippy::too_many_arguments)]
fn match_subtrees(
    left: &TrivalentGraph,
    right: &TrivalentGraph,
    lh: &Half,
    rh: &Half,
    lid: &HashMap<usize, u32>,
    rid: &HashMap<usize, u32>,
    lv: usize,
    rv: usize,
    pairs: &mut Vec<(i64, i64)>,
) {
    let mut stack = vec![(lv, rv)];
    while let Some((a, b)) = stack.pop() {
        pairs.push((left.labels[a], right.labels[b]));
        let mut ca = children(left, lh, a);
        let mut cb = children(right, rh, b);
        ca.sort_by_key(|v| (lid[v], left.labels[*v]));
        cb.sort_by_key(|v| (rid[v], right.labels[*v]));
        stack.extend(ca.into_iter().zip(cb));
    }
}

/// Check that `iso` is a bijection mapping edges onto edges, free ends onto
/// free ends and the distinguished edge onto the distinguished edge.
pub fn verify(left: &TrivalentGraph, right: &TrivalentGraph, iso: &Isomorphism) -> bool {
    if iso.pairs.len() != left.node_count() || left.node_count() != right.node_count() {
        return false;
    }
    let mut targets: Vec<i64> = iso.pairs.iter().map(|p| p.1).collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() != right.node_count() || targets.iter().any(|t| !right.index.contains_key(t)) {
        return false;
    }
    for &(a, b) in &iso.pairs {
        let (Some(&ia), Some(&ib)) = (left.index.get(&a), right.index.get(&b)) else {
            return false;
        };
        if left.free_ends[ia] != right.free_ends[ib] {
            return false;
        }
        let mut mapped: Vec<i64> = left.adj[ia].iter().filter_map(|&w| iso.image(left.labels[w])).collect();
        let mut actual: Vec<i64> = right.adj[ib].iter().map(|&w| right.labels[w]).collect();
        mapped.sort_unstable();
        actual.sort_unstable();
        if mapped != actual {
            return false;
        }
    }
    match (left.distinguished(), right.distinguished()) {
        (Some((a, b)), Some((c, d))) => {
            let (x, y) = (iso.image(a), iso.image(b));
            (x, y) == (Some(c), Some(d)) || (x, y) == (Some(d), Some(c))
        }
        (None, None) => true,
        _ => false,
    }
}
