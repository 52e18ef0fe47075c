use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{PantsError, PantsSpec};
use crate::trivalent::TrivalentGraph;

/// Boundary slot `slot ∈ {0, 1, 2}` of the pants labelled `pants`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SlotRef {
    pub pants: i64,
    pub slot: u8,
}

impl SlotRef {
    pub fn new(pants: i64, slot: u8) -> Self {
        SlotRef { pants, slot }
    }
}

impl fmt::Display for SlotRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}.{}", self.pants, self.slot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gluing {
    pub a: SlotRef,
    pub b: SlotRef,
}

/// Pants glued along equal-length boundary slots (twists are not modelled).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluedSurface {
    pants: BTreeMap<i64, PantsSpec>,
    gluings: Vec<Gluing>,
    distinguished: Option<(i64, i64)>,
}

impl GluedSurface {
    pub fn new(pants: Vec<(i64, PantsSpec)>, gluings: Vec<Gluing>) -> Result<Self, PantsError> {
        let map: BTreeMap<i64, PantsSpec> = pants.into_iter().collect();
        let mut used = BTreeSet::new();
        for g in &gluings {
            for s in [g.a, g.b] {
                if !map.contains_key(&s.pants) {
                    return Err(PantsError::UnknownPants(s.pants));
                }
                if s.slot > 2 {
                    return Err(PantsError::BadSlots(s.slot as usize, s.slot as usize));
                }
                if !used.insert(s) {
                    return Err(PantsError::SlotReused(s.to_string()));
                }
            }
            let (la, lb) = (map[&g.a.pants].length(g.a.slot as usize), map[&g.b.pants].length(g.b.slot as usize));
            if la != lb {
                return Err(PantsError::LengthMismatch(format!("{} ~ {}", g.a, g.b), la, lb));
            }
        }
        Ok(GluedSurface { pants: map, gluings, distinguished: None })
    }

    pub fn pants(&self) -> impl Iterator<Item = (i64, &PantsSpec)> {
        self.pants.iter().map(|(k, v)| (*k, v))
    }

    pub fn pants_count(&self) -> usize {
        self.pants.len()
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn distinguished(&self) -> Option<(i64, i64)> {
        self.distinguished
    }

    /// Unglued slots, sorted.
    pub fn free_slots(&self) -> Vec<SlotRef> {
        let used: BTreeSet<SlotRef> = self.gluings.iter().flat_map(|g| [g.a, g.b]).collect();
        self.pants
            .keys()
            .flat_map(|&p| (0..3).map(move |s| SlotRef::new(p, s)))
            .filter(|s| !used.contains(s))
            .collect()
    }

    pub fn boundary_count(&self) -> usize {
        self.pants.len() * 3 - 2 * self.gluings.len()
    }

    /// Number of connected components of the gluing graph.
    pub fn components(&self) -> usize {
        let keys: Vec<i64> = self.pants.keys().copied().collect();
        let pos = |p: i64| keys.binary_search(&p).unwrap();
        let mut parent: Vec<usize> = (0..keys.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in &self.gluings {
            let (a, b) = (find(&mut parent, pos(g.a.pants)), find(&mut parent, pos(g.b.pants)));
            parent[a] = b;
        }
        (0..keys.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Genus of a connected surface, from `χ = -#pants = 2 - 2g - #boundary`.
    pub fn genus(&self) -> Option<usize> {
        if self.components() != 1 {
            return None;
        }
        let twice = 2 + self.pants.len() as i64 - self.boundary_count() as i64;
        (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as usize)
    }

    /// Pants as nodes, gluings as edges, free slots as free ends.
    pub fn to_trivalent(&self) -> TrivalentGraph {
        let labels: Vec<i64> = self.pants.keys().copied().collect();
        let mut free = vec![0usize; labels.len()];
        for s in self.free_slots() {
            free[labels.binary_search(&s.pants).unwrap()] += 1;
        }
        let edges: Vec<(i64, i64)> = self.gluings.iter().map(|g| (g.a.pants, g.b.pants)).collect();
        TrivalentGraph::new(labels, &edges, free, self.distinguished).expect("pants labels are unique")
    }

    /// Graphviz rendering, one node per pants and one edge per gluing.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {name} {{");
        for (p, spec) in &self.pants {
            let [a, b, c] = spec.lengths();
            let _ = writeln!(out, "  P{} [label=\"P{}\\n({a}, {b}, {c})\"];", dot_id(*p), p);
        }
        for g in &self.gluings {
            let style = if Some((g.a.pants, g.b.pants)) == self.distinguished { ", style=bold" } else { "" };
            let _ = writeln!(
                out,
                "  P{} -- P{} [label=\"{}~{}\"{style}];",
                dot_id(g.a.pants),
                dot_id(g.b.pants),
                g.a.slot,
                g.b.slot
            );
        }
        for s in self.free_slots() {
            let _ = writeln!(out, "  free_{}_{} [shape=point];", dot_id(s.pants), s.slot);
            let _ = writeln!(out, "  P{} -- free_{}_{} [label=\"{}\"];", dot_id(s.pants), dot_id(s.pants), s.slot, s.slot);
        }
        out.push_str("}\n");
        out
    }
}

fn dot_id(p: i64) -> String {
    if p < 0 { format!("m{}", -p) } else { p.to_string() }
}

/// The heap gluing for one side: slot 1 of `P_n` to slot 0 of `P_{2n}` and
/// slot 2 of `P_n` to slot 0 of `P_{2n+1}`, for `n < 2^{k-1}`.
fn side(k: u32, sign: i64, spec: PantsSpec) -> (Vec<(i64, PantsSpec)>, Vec<Gluing>) {
    let count = (1i64 << k) - 1;
    let pants = (1..=count).map(|n| (sign * n, spec)).collect();
    let gluings = (1..(1i64 << (k - 1)))
        .flat_map(|n| {
            [
                Gluing { a: SlotRef::new(sign * n, 1), b: SlotRef::new(sign * 2 * n, 0) },
                Gluing { a: SlotRef::new(sign * n, 2), b: SlotRef::new(sign * (2 * n + 1), 0) },
            ]
        })
        .collect();
    (pants, gluings)
}

fn equilateral(length: f64) -> Result<PantsSpec, PantsError> {
    PantsSpec::new(length, length, length)
}

/// `X_k`: pants `P_1 … P_{2^k - 1}` glued generation by generation; slot 0
/// of `P_1` stays free. Bounded by `2^k + 1` curves.
pub fn build_xk(k: u32, length: f64) -> Result<GluedSurface, PantsError> {
    if k == 0 {
        return Err(PantsError::NoGenerations);
    }
    let (pants, gluings) = side(k, 1, equilateral(length)?);
    GluedSurface::new(pants, gluings)
}

/// `X_k` and its mirror `X_{-k}` joined by gluing slot 0 of `P_1` to slot 0
/// of `P_{-1}`; that gluing is the distinguished edge.
pub fn build_xinfty(k: u32, length: f64) -> Result<GluedSurface, PantsError> {
    if k == 0 {
        return Err(PantsError::NoGenerations);
    }
    let spec = equilateral(length)?;
    let (mut pants, mut gluings) = side(k, 1, spec);
    let (neg_pants, neg_gluings) = side(k, -1, spec);
    pants.extend(neg_pants);
    gluings.push(Gluing { a: SlotRef::new(1, 0), b: SlotRef::new(-1, 0) });
    gluings.extend(neg_gluings);
    let mut s = GluedSurface::new(pants, gluings)?;
    s.distinguished = Some((1, -1));
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_generation_has_five_boundaries() {
        let x2 = build_xk(2, 1.0).unwrap();
        assert_eq!(x2.pants_count(), 3);
        assert_eq!(x2.boundary_count(), 5);
        let free: Vec<String> = x2.free_slots().iter().map(|s| s.to_string()).collect();
        assert_eq!(free, vec!["P1.0", "P2.1", "P2.2", "P3.1", "P3.2"]);
    }

    #[test]
    fn boundary_counts() {
        for k in 1..=12 {
            let xk = build_xk(k, 1.0).unwrap();
            assert_eq!(xk.boundary_count(), (1 << k) + 1);
            assert_eq!(xk.free_slots().len(), xk.boundary_count());
            assert_eq!(xk.pants_count(), (1 << k) - 1);
            assert_eq!(xk.genus(), Some(0));
            let full = build_xinfty(k, 1.0).unwrap();
            assert_eq!(full.boundary_count(), 2 * (1 << k));
            assert_eq!(full.components(), 1);
        }
    }

    #[test]
    fn validation() {
        let p = PantsSpec::new(1.0, 1.0, 2.0).unwrap();
        let bad = GluedSurface::new(vec![(1, p), (2, p)], vec![Gluing { a: SlotRef::new(1, 0), b: SlotRef::new(2, 2) }]);
        assert!(matches!(bad, Err(PantsError::LengthMismatch(..))));
        let reused = GluedSurface::new(
            vec![(1, p), (2, p)],
            vec![Gluing { a: SlotRef::new(1, 0), b: SlotRef::new(2, 0) }, Gluing { a: SlotRef::new(1, 0), b: SlotRef::new(2, 1) }],
        );
        assert!(matches!(reused, Err(PantsError::SlotReused(_))));
        assert!(build_xk(0, 1.0).is_err());
    }

    #[test]
    fn dot_is_deterministic() {
        let a = build_xinfty(2, 1.0).unwrap().to_dot("X");
        let b = build_xinfty(2, 1.0).unwrap().to_dot("X");
        assert_eq!(a, b);
        assert!(a.contains("P1 -- Pm1 [label=\"0~0\", style=bold];"));
    }
}
