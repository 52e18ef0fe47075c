use num_complex::Complex64;
use rayon::prelude::*;

use crate::moebius::{Circle, Moebius};

use super::words::{GroupWord, Letter};
use super::{SchottkyData, SchottkyError, CONTACT_TOL, DEFAULT_NODE_BUDGET};

/// Position of a node: `depth` is the word length (roots have depth 1),
/// `index` the position within that depth in lexicographic word order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub depth: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskNode {
    letter: Letter,
    parent: Option<u32>,
    disk: Circle,
    children: (u32, u32),
    margin: f64,
}

impl DiskNode {
    /// Last letter of the node's word.
    pub fn letter(&self) -> Letter {
        self.letter
    }

    /// Index of the parent in the previous depth.
    pub fn parent(&self) -> Option<usize> {
        self.parent.map(|p| p as usize)
    }

    pub fn disk(&self) -> &Circle {
        &self.disk
    }

    /// Radius, `∞` for unbounded regions.
    pub fn radius(&self) -> f64 {
        match (self.disk.radius(), self.disk.inside()) {
            (Some(r), true) => r,
            _ => f64::INFINITY,
        }
    }

    pub fn center(&self) -> Option<Complex64> {
        self.disk.center()
    }

    /// Range of child indices in the next depth.
    pub fn children(&self) -> std::ops::Range<usize> {
        self.children.0 as usize..self.children.1 as usize
    }

    pub fn is_leaf(&self) -> bool {
        self.children.0 == self.children.1
    }

    /// Containment margin inside the parent disk (`∞` for roots).
    pub fn margin(&self) -> f64 {
        self.margin
    }
}

/// When to stop expanding: a node is expanded while its depth is below
/// `max_depth` and (if given) its radius is at least `max_radius`.
/// `max_depth` 0 and 1 both mean the root disks only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSetStop {
    pub max_depth: usize,
    pub max_radius: Option<f64>,
    pub node_budget: u64,
}

impl LimitSetStop {
    pub fn depth(max_depth: usize) -> Self {
        LimitSetStop { max_depth, max_radius: None, node_budget: DEFAULT_NODE_BUDGET }
    }

    pub fn with_radius(mut self, max_radius: f64) -> Self {
        self.max_radius = Some(max_radius);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }
}

/// Nested image disks `γ(D_j)` keyed by reduced words: the node for
/// `l_1 … l_n` holds `(γ_{l_1} ∘ … ∘ γ_{l_{n-1}})(D_{l_n})`, where `D_l` is
/// the disk the letter `l` maps into.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskTree {
    genus: usize,
    levels: Vec<Vec<DiskNode>>,
    min_margin: f64,
    verified: bool,
}

impl DiskTree {
    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Largest word length present.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Nodes of word length `depth` (1-based; empty outside the tree).
    pub fn level(&self, depth: usize) -> &[DiskNode] {
        depth.checked_sub(1).and_then(|d| self.levels.get(d)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count_at_depth(&self, depth: usize) -> usize {
        self.level(depth).len()
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn node(&self, id: NodeId) -> &DiskNode {
        &self.levels[id.depth - 1][id.index]
    }

    pub fn roots(&self) -> &[DiskNode] {
        self.level(1)
    }

    /// Whether nesting was checked during expansion.
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Smallest child-in-parent containment margin seen.
    pub fn min_margin(&self) -> f64 {
        self.min_margin
    }

    pub fn word(&self, id: NodeId) -> GroupWord {
        let mut letters = Vec::with_capacity(id.depth);
        let mut cur = Some(id.index);
        let mut depth = id.depth;
        while let (Some(i), true) = (cur, depth >= 1) {
            let n = &self.levels[depth - 1][i];
            letters.push(n.letter);
            cur = n.parent();
            depth -= 1;
        }
        letters.reverse();
        GroupWord::from_letters(letters)
    }

    /// Locate the node of a reduced word, if it was generated.
    pub fn find(&self, word: &GroupWord) -> Option<NodeId> {
        let letters = word.letters();
        let first = letters.first()?;
        if first.generator() >= self.genus || !word.is_reduced() {
            return None;
        }
        let mut index = first.index();
        for (k, pair) in letters.windows(2).enumerate() {
            let parent = &self.levels[k][index];
            if parent.is_leaf() || pair[1].generator() >= self.genus {
                return None;
            }
            let l = pair[1].index();
            let forbidden = pair[0].inverse().index();
            index = parent.children.0 as usize + if l < forbidden { l } else { l - 1 };
        }
        Some(NodeId { depth: letters.len(), index })
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.levels.iter().enumerate().flat_map(|(d, nodes)| {
            nodes.iter().enumerate().filter(|(_, n)| n.is_leaf()).map(move |(i, _)| NodeId { depth: d + 1, index: i })
        })
    }

    /// Leaf-disk centres with their depth; within [`Self::max_leaf_radius`]
    /// of the limit set for classical data.
    pub fn point_cloud(&self) -> Vec<(Complex64, usize)> {
        self.leaves().filter_map(|id| self.node(id).center().map(|c| (c, id.depth))).collect()
    }

    pub fn max_leaf_radius(&self) -> f64 {
        self.leaves().map(|id| self.node(id).radius()).fold(0.0, f64::max)
    }

    /// `(min, max)` radius over nodes of the given depth.
    pub fn radius_range(&self, depth: usize) -> Option<(f64, f64)> {
        let nodes = self.level(depth);
        if nodes.is_empty() {
            return None;
        }
        let (lo, hi) = nodes.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), n| (lo.min(n.radius()), hi.max(n.radius())));
        Some((lo, hi))
    }

    /// Every child radius is strictly smaller than its parent's.
    pub fn radii_strictly_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].iter().all(|c| c.radius() < w[0][c.parent().unwrap()].radius()))
    }
}

/// Approximate the limit set of classical data by nested disks, checking
/// containment of every child in its parent.
pub fn limit_set(s: &SchottkyData, stop: LimitSetStop) -> Result<DiskTree, SchottkyError> {
    if !s.validity().is_classical() {
        return Err(SchottkyError::NotClassical);
    }
    if let Some(i) = s.disks().iter().position(|d| !d.is_bounded_disk()) {
        return Err(SchottkyError::UnboundedDisk { index: i });
    }
    expand(s, stop, true)
}

/// Image disks to finite depth without the nesting check; also accepts
/// tangent-degenerate data, for rendering.
pub fn disk_images(s: &SchottkyData, stop: LimitSetStop) -> Result<DiskTree, SchottkyError> {
    expand(s, stop, false)
}

fn expand(s: &SchottkyData, stop: LimitSetStop, verify: bool) -> Result<DiskTree, SchottkyError> {
    let g = s.genus();
    let gens = s.generators();
    let disks = s.disks();
    let alphabet = 2 * g;
    if alphabet as u64 > stop.node_budget {
        return Err(SchottkyError::DepthLimit { requested: alphabet as u128, budget: stop.node_budget });
    }
    let roots: Vec<DiskNode> = (0..alphabet)
        .map(|i| {
            let letter = Letter::from_index(i);
            DiskNode { letter, parent: None, disk: disks[letter.disk_index()], children: (0, 0), margin: f64::INFINITY }
        })
        .collect();
    let mut levels = vec![roots];
    // prefix[i] maps the root disk of node i's last letter onto the node's disk
    let mut prefix = vec![Moebius::identity(); alphabet];
    let mut letter_maps: Vec<Moebius> = (0..alphabet).map(|i| Letter::from_index(i).map(gens)).collect();
    letter_maps.shrink_to_fit();
    let mut total = alphabet as u128;
    let mut min_margin = f64::INFINITY;
    let max_depth = stop.max_depth.max(1);

    while levels.len() < max_depth {
        let depth = levels.len();
        let current = levels.last().unwrap();
        let expandable = |n: &DiskNode| stop.max_radius.is_none_or(|r| n.radius() >= r);
        let n_expand = current.iter().filter(|n| expandable(n)).count() as u128;
        if n_expand == 0 {
            break;
        }
        let requested = total + n_expand * (alphabet as u128 - 1);
        if requested > stop.node_budget as u128 {
            return Err(SchottkyError::DepthLimit { requested, budget: stop.node_budget });
        }
        let produced: Vec<Vec<(DiskNode, Moebius)>> = current
            .par_iter()
            .zip(prefix.par_iter())
            .enumerate()
            .map(|(pi, (parent, pre))| {
                if !expandable(parent) {
                    return Vec::new();
                }
                let m = pre.compose(&letter_maps[parent.letter.index()]);
                let forbidden = parent.letter.inverse();
                (0..alphabet)
                    .map(Letter::from_index)
                    .filter(|l| *l != forbidden)
                    .map(|l| {
                        let disk = m.map_circle(&disks[l.disk_index()]);
                        let margin = parent.disk.containment_margin(&disk);
                        (DiskNode { letter: l, parent: Some(pi as u32), disk, children: (0, 0), margin }, m)
                    })
                    .collect()
            })
            .collect();

        let mut next = Vec::with_capacity(produced.iter().map(Vec::len).sum());
        let mut next_prefix = Vec::with_capacity(next.capacity());
        let current = levels.last_mut().unwrap();
        for (pi, kids) in produced.into_iter().enumerate() {
            let start = next.len() as u32;
            for (node, m) in kids {
                if verify && !(node.margin >= -CONTACT_TOL) {
                    let partial = DiskTree { genus: g, levels: levels.clone(), min_margin, verified: true };
                    let mut word = partial.word(NodeId { depth, index: pi });
                    word.push(node.letter);
                    return Err(SchottkyError::ContractionFailure { word: word.to_string(), margin: node.margin });
                }
                min_margin = min_margin.min(node.margin);
                next.push(node);
                next_prefix.push(m);
            }
            current[pi].children = (start, next.len() as u32);
        }
        total += next.len() as u128;
        levels.push(next);
        prefix = next_prefix;
    }
    Ok(DiskTree { genus: g, levels, min_margin, verified: verify })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::words::{enumerate_words, reduced_word_count};
    use crate::schottky::Validity;

    #[test]
    fn depth_zero_and_one_are_roots() {
        let s = SchottkyData::two_pair_example().unwrap();
        for d in [0, 1] {
            let t = limit_set(&s, LimitSetStop::depth(d)).unwrap();
            assert_eq!(t.node_count(), 4);
            assert_eq!(t.depth(), 1);
            for (i, n) in t.roots().iter().enumerate() {
                assert_eq!(n.disk(), &s.disks()[n.letter().disk_index()]);
                assert_eq!(n.letter().index(), i);
            }
        }
    }

    #[test]
    fn counts_and_nesting() {
        let s = SchottkyData::two_pair_example().unwrap();
        let t = limit_set(&s, LimitSetStop::depth(6)).unwrap();
        for n in 1..=6 {
            assert_eq!(t.count_at_depth(n) as u128, reduced_word_count(2, n).unwrap());
        }
        assert!(t.min_margin() > 0.0);
        assert!(t.radii_strictly_decreasing());
        // the node keyed by a word really is that word's image disk
        for w in enumerate_words(2, 4, 1000).unwrap() {
            let id = t.find(&w).unwrap();
            assert_eq!(t.word(id), w);
            let (init, last) = w.letters().split_at(3);
            let m = GroupWord::from_letters(init.to_vec()).evaluate(s.generators());
            let expected = m.map_circle(&s.disks()[last[0].disk_index()]);
            assert!(t.node(id).disk().approx_eq(&expected, 1e-10));
        }
    }

    #[test]
    fn radius_decay_between_depths() {
        let s = SchottkyData::two_pair_example().unwrap();
        let t = limit_set(&s, LimitSetStop::depth(8)).unwrap();
        let (_, max4) = t.radius_range(4).unwrap();
        assert!(t.max_leaf_radius() < max4);
        assert_eq!(t.point_cloud().len(), t.count_at_depth(8));
    }

    #[test]
    fn radius_stop() {
        let s = SchottkyData::standard(2).unwrap();
        let t = limit_set(&s, LimitSetStop::depth(40).with_radius(1e-3)).unwrap();
        assert!(t.max_leaf_radius() < 1e-3);
        for id in t.leaves() {
            assert!(t.node(id).radius() < 1e-3 || id.depth == 40);
        }
    }

    #[test]
    fn budget_and_refusals() {
        let s = SchottkyData::standard(2).unwrap();
        let err = limit_set(&s, LimitSetStop::depth(10).with_budget(1000)).unwrap_err();
        assert!(matches!(err, SchottkyError::DepthLimit { .. }));
        let tangent = SchottkyData::tangent_example(2).unwrap();
        assert!(matches!(tangent.validity(), Validity::TangentDegenerate { .. }));
        assert_eq!(limit_set(&tangent, LimitSetStop::depth(3)).unwrap_err(), SchottkyError::NotClassical);
        let images = disk_images(&tangent, LimitSetStop::depth(4)).unwrap();
        assert_eq!(images.count_at_depth(4), 108);
        assert!(!images.is_verified());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let s = SchottkyData::two_pair_example().unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| limit_set(&s, LimitSetStop::depth(7)).unwrap());
        let b = limit_set(&s, LimitSetStop::depth(7)).unwrap();
        assert_eq!(a, b);
    }
}
