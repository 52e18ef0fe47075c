//! Exact certificates for the circle family.
//!
//! All round circles are centred on the real axis, so two of them are
//! disjoint as curves exactly when their real diameters are either disjoint or
//! strictly nested, and a circle misses the imaginary axis exactly when its
//! diameter misses 0. Disjointness of the whole family is therefore the
//! statement that the diameters form a laminar family with pairwise distinct
//! endpoints none of which is 0, checked in one sorted sweep. For such a
//! family the distance between two circles is the smallest difference between
//! an endpoint of one and an endpoint of the other, and the minimum over all
//! pairs is attained by neighbours in the sweep.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{serialize_rational, CantorCircle, CantorError, CircleFamily, CircleId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjointnessCertificate {
    pub circles: usize,
    /// Smallest distance between two distinct circles (including the axis).
    #[serde(serialize_with = "serialize_rational")]
    pub min_gap: BigRational,
    pub min_gap_pair: (CircleId, CircleId),
    /// Smallest distance from a round circle to the imaginary axis.
    #[serde(serialize_with = "serialize_rational")]
    pub min_axis_gap: BigRational,
    pub min_axis_circle: Option<CircleId>,
    /// Deepest nesting met during the sweep.
    pub max_nesting: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Event {
    Open,
    Axis,
    Close,
}

/// Sweep certificate that the given circles are pairwise disjoint.
pub fn certify_disjoint(circles: &[CantorCircle]) -> Result<DisjointnessCertificate, CantorError> {
    let mut events: Vec<(BigRational, Event, CircleId)> = Vec::with_capacity(2 * circles.len());
    for c in circles {
        match c.shadow() {
            Some((lo, hi)) => {
                events.push((lo, Event::Open, c.id()));
                events.push((hi, Event::Close, c.id()));
            }
            None => events.push((BigRational::zero(), Event::Axis, c.id())),
        }
    }
    events.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut stack: Vec<CircleId> = Vec::new();
    let mut max_nesting = 0;
    let mut min_gap: Option<(BigRational, CircleId, CircleId)> = None;
    let mut min_axis: Option<(BigRational, CircleId)> = None;
    for pair in events.windows(2) {
        let (x, _, a) = &pair[0];
        let (y, _, b) = &pair[1];
        if x == y {
            return Err(CantorError::NotDisjoint { first: *a, second: *b });
        }
        if a != b {
            let gap = y - x;
            if min_gap.as_ref().is_none_or(|(g, _, _)| gap < *g) {
                min_gap = Some((gap.clone(), *a, *b));
            }
            for (id, other) in [(a, b), (b, a)] {
                if *other == CircleId::AXIS && *id != CircleId::AXIS && min_axis.as_ref().is_none_or(|(g, _)| gap < *g) {
                    min_axis = Some((gap.clone(), *id));
                }
            }
        }
    }
    for (_, kind, id) in &events {
        match kind {
            Event::Open => {
                stack.push(*id);
                max_nesting = max_nesting.max(stack.len());
            }
            Event::Close => match stack.pop() {
                Some(top) if top == *id => {}
                Some(top) => return Err(CantorError::NotDisjoint { first: top, second: *id }),
                None => return Err(CantorError::NotDisjoint { first: *id, second: *id }),
            },
            Event::Axis => {
                if let Some(top) = stack.last() {
                    return Err(CantorError::NotDisjoint { first: *top, second: *id });
                }
            }
        }
    }
    let (min_gap, a, b) = min_gap.unwrap_or((BigRational::zero(), CircleId::AXIS, CircleId::AXIS));
    let (min_axis_gap, min_axis_circle) = match min_axis {
        Some((g, id)) => (g, Some(id)),
        None => (BigRational::zero(), None),
    };
    Ok(DisjointnessCertificate { circles: circles.len(), min_gap, min_gap_pair: (a, b), min_axis_gap, min_axis_circle, max_nesting })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentCertificate {
    /// Parents checked (all circles of levels `1..k_max`).
    pub parents: usize,
    /// Smallest `r_parent - |c_parent - c_child| - r_child` over named pairs.
    #[serde(serialize_with = "serialize_rational")]
    pub min_margin: BigRational,
}

/// For every `C_k^i` with `k < k_max`: the level-`k+1` circles inside it are
/// exactly its two named children, strictly inside.
pub fn certify_containment(family: &CircleFamily) -> Result<ContainmentCertificate, CantorError> {
    let mut parents = 0;
    let mut min_margin: Option<BigRational> = None;
    for k in 1..family.k_max() {
        let next = family.level(k + 1);
        let shadows: Vec<(BigRational, BigRational)> = next.iter().map(|c| c.shadow().expect("round")).collect();
        for parent in family.level(k) {
            parents += 1;
            let (lo, hi) = parent.shadow().expect("round");
            let start = shadows.partition_point(|(l, _)| *l < lo);
            let mut found = Vec::new();
            let mut straddling = start > 0 && shadows[start - 1].1 >= lo;
            for (c, (l, h)) in next[start..].iter().zip(&shadows[start..]) {
                if *l > hi {
                    break;
                }
                if *h >= hi {
                    straddling = true;
                    break;
                }
                found.push(c.id());
                let margin = (l - &lo).min(&hi - h);
                if min_margin.as_ref().is_none_or(|m| margin < *m) {
                    min_margin = Some(margin);
                }
            }
            let mut named = parent.id().children().to_vec();
            named.sort();
            found.sort();
            if found != named || straddling {
                return Err(CantorError::Containment { parent: parent.id(), found });
            }
        }
    }
    Ok(ContainmentCertificate { parents, min_margin: min_margin.unwrap_or_else(BigRational::zero) })
}

/// For every `C_k^i` with `k + depth ≤ k_max`, the circles `depth` levels
/// below it are the images of the level-`depth` circles under the affine map
/// `x ↦ m + h x` taking `[-1, 1]` onto `I_k^i`. Returns the number of
/// circles compared.
pub fn certify_self_similarity(family: &CircleFamily, depth: u32) -> Result<usize, CantorError> {
    let mut compared = 0;
    if depth == 0 {
        return Ok(0);
    }
    let base: Vec<(BigRational, BigRational)> =
        family.level(depth).iter().map(|c| (c.center().unwrap().clone(), c.radius().unwrap().clone())).collect();
    for k in 1..=family.k_max().saturating_sub(depth) {
        let below = family.level(k + depth);
        let block = 1usize << depth;
        for (j, parent) in family.level(k).iter().enumerate() {
            let (lo, hi) = parent.shadow().unwrap();
            let m = parent.center().unwrap().clone();
            // half-length of I_k^i is (3/5)·r
            let h = parent.radius().unwrap() * BigRational::new(BigInt::from(3), BigInt::from(5));
            let ours = &below[j * block..(j + 1) * block];
            for ((c, r), mine) in base.iter().zip(ours) {
                let image_c = &m + &h * c;
                let image_r = &h * r;
                if mine.center() != Some(&image_c) || mine.radius() != Some(&image_r) {
                    return Err(CantorError::SelfSimilarity { circle: parent.id() });
                }
                let (l, u) = mine.shadow().unwrap();
                if !(l > lo && u < hi) || image_r.is_negative() {
                    return Err(CantorError::SelfSimilarity { circle: parent.id() });
                }
                compared += 1;
            }
        }
    }
    Ok(compared)
}
