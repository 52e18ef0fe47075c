//! The middle-third Cantor set in `[-1, 1]`, the circles around its
//! construction intervals, and the pants decomposition they cut out.
//!
//! Everything here is exact: endpoints, centres, radii and gaps are
//! `BigRational`s and every disjointness or containment claim is an exact
//! inequality.
//!
//! Indexing: the level-`k` intervals are `I_k^i` with
//! `i ∈ {±1, …, ±2^{k-1}}`, positive indices numbered left to right on the
//! positive axis and `I_k^{-i} = -I_k^i`. The children of `I_k^i` are
//! `I_{k+1}^{ε(i)(2|i|-1)}` and `I_{k+1}^{2i}`. The circle `C_k^i` has the
//! midpoint of `I_k^i` as centre and `5/6 |I_k^i|` as radius; `C_0^0` is the
//! imaginary axis.

mod certificate;
mod graph;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::moebius::Circle;
use crate::Complex64;

pub use certificate::{
    certify_containment, certify_disjoint, certify_self_similarity, ContainmentCertificate, DisjointnessCertificate,
};
pub use graph::{graph_isomorphic_to_xinfty, pants_graph, pants_index, PantsEdge, PantsGraph, PantsNode};

/// Deepest level handled exactly.
pub const MAX_LEVEL: u32 = 40;

/// Cap on the number of objects materialised by the list-producing calls.
pub const LIST_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CantorError {
    #[error("level {level} outside 1..={max}")]
    LevelLimit { level: u32, max: u32 },
    #[error("level {level} would produce {count} objects (budget {budget})")]
    TooMany { level: u32, count: u128, budget: u64 },
    #[error("no interval with index {index} at level {level}")]
    InvalidIndex { level: u32, index: i64 },
    #[error("circles {first} and {second} intersect or touch")]
    NotDisjoint { first: CircleId, second: CircleId },
    #[error("{parent} contains {found:?} at the next level instead of its two children")]
    Containment { parent: CircleId, found: Vec<CircleId> },
    #[error("configuration inside {circle} is not the rescaled base configuration")]
    SelfSimilarity { circle: CircleId },
}

/// `C_k^i`, or `C_0^0` for the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CircleId {
    pub level: u32,
    pub index: i64,
}

impl CircleId {
    pub const AXIS: CircleId = CircleId { level: 0, index: 0 };

    pub fn new(level: u32, index: i64) -> Self {
        CircleId { level, index }
    }

    /// The two circles one level down, in the order `ε(i)(2|i|-1)`, `2i`.
    pub fn children(&self) -> [CircleId; 2] {
        let [a, b] = child_indices(self.index);
        [CircleId::new(self.level + 1, a), CircleId::new(self.level + 1, b)]
    }
}

impl fmt::Display for CircleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}^{}", self.level, self.index)
    }
}

fn child_indices(i: i64) -> [i64; 2] {
    let s = i.signum();
    [s * (2 * i.abs() - 1), 2 * i]
}

fn check_level(level: u32) -> Result<(), CantorError> {
    if level == 0 || level > MAX_LEVEL {
        return Err(CantorError::LevelLimit { level, max: MAX_LEVEL });
    }
    Ok(())
}

fn check_index(level: u32, index: i64) -> Result<(), CantorError> {
    let half = 1i64 << (level - 1);
    if index == 0 || index.abs() > half {
        return Err(CantorError::InvalidIndex { level, index });
    }
    Ok(())
}

fn pow3(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(3), k as usize)
}

fn third_power(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), pow3(k))
}

pub(crate) fn serialize_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Closed interval `I_k^i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TriadicInterval {
    level: u32,
    index: i64,
    #[serde(serialize_with = "serialize_rational")]
    left: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    right: BigRational,
}

impl TriadicInterval {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn id(&self) -> CircleId {
        CircleId::new(self.level, self.index)
    }

    pub fn left(&self) -> &BigRational {
        &self.left
    }

    pub fn right(&self) -> &BigRational {
        &self.right
    }

    pub fn length(&self) -> BigRational {
        &self.right - &self.left
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.left + &self.right) / BigInt::from(2)
    }

    /// The two intervals left after removing the open middle third, in the
    /// order `ε(i)(2|i|-1)`, `2i`.
    pub fn children(&self) -> [TriadicInterval; 2] {
        let third = self.length() / BigInt::from(3);
        let lower = TriadicInterval { level: self.level + 1, index: 0, left: self.left.clone(), right: &self.left + &third };
        let upper = TriadicInterval { level: self.level + 1, index: 0, left: &self.right - &third, right: self.right.clone() };
        let [a, b] = child_indices(self.index);
        // for negative indices the numbering runs right to left
        if self.index > 0 {
            [TriadicInterval { index: a, ..lower }, TriadicInterval { index: b, ..upper }]
        } else {
            [TriadicInterval { index: a, ..upper }, TriadicInterval { index: b, ..lower }]
        }
    }

    fn mirrored(&self) -> TriadicInterval {
        TriadicInterval { level: self.level, index: -self.index, left: -self.right.clone(), right: -self.left.clone() }
    }
}

/// `I_k^i` computed directly from the binary digits of `|i| - 1`.
pub fn interval(level: u32, index: i64) -> Result<TriadicInterval, CantorError> {
    check_level(level)?;
    check_index(level, index)?;
    let p = (index.abs() - 1) as u64;
    // centre · 3^k = 2·3^{k-1} + Σ_{j=2}^{k} ±2·3^{k-j}, the sign from bit k-j of p
    let mut num = BigInt::from(2) * pow3(level - 1);
    for j in 2..=level {
        let bit = (p >> (level - j)) & 1;
        let step = BigInt::from(2) * pow3(level - j);
        if bit == 1 {
            num += step;
        } else {
            num -= step;
        }
    }
    let denom = pow3(level);
    let center = BigRational::new(num, denom.clone());
    let half = BigRational::new(BigInt::one(), denom);
    let iv = TriadicInterval { level, index: index.abs(), left: &center - &half, right: &center + &half };
    Ok(if index < 0 { iv.mirrored() } else { iv })
}

/// All `2^k` intervals of level `k`, sorted left to right.
pub fn cantor_intervals(level: u32) -> Result<Vec<TriadicInterval>, CantorError> {
    check_level(level)?;
    let count = 1u128 << level;
    if count > LIST_BUDGET as u128 {
        return Err(CantorError::TooMany { level, count, budget: LIST_BUDGET });
    }
    let mut positive = vec![interval(1, 1)?];
    for _ in 1..level {
        positive = positive.iter().flat_map(|iv| iv.children()).collect();
    }
    let mut out: Vec<TriadicInterval> = positive.iter().rev().map(TriadicInterval::mirrored).collect();
    out.extend(positive);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CantorShape {
    ImaginaryAxis,
    Round {
        #[serde(serialize_with = "serialize_rational")]
        center: BigRational,
        #[serde(serialize_with = "serialize_rational")]
        radius: BigRational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CantorCircle {
    id: CircleId,
    shape: CantorShape,
}

impl CantorCircle {
    pub fn axis() -> Self {
        CantorCircle { id: CircleId::AXIS, shape: CantorShape::ImaginaryAxis }
    }

    pub fn around(iv: &TriadicInterval) -> Self {
        let radius = iv.length() * BigRational::new(BigInt::from(5), BigInt::from(6));
        CantorCircle { id: iv.id(), shape: CantorShape::Round { center: iv.midpoint(), radius } }
    }

    pub fn id(&self) -> CircleId {
        self.id
    }

    pub fn shape(&self) -> &CantorShape {
        &self.shape
    }

    pub fn center(&self) -> Option<&BigRational> {
        match &self.shape {
            CantorShape::Round { center, .. } => Some(center),
            CantorShape::ImaginaryAxis => None,
        }
    }

    pub fn radius(&self) -> Option<&BigRational> {
        match &self.shape {
            CantorShape::Round { radius, .. } => Some(radius),
            CantorShape::ImaginaryAxis => None,
        }
    }

    /// The diameter on the real axis, `[c - r, c + r]`.
    pub fn shadow(&self) -> Option<(BigRational, BigRational)> {
        match &self.shape {
            CantorShape::Round { center, radius } => Some((center - radius, center + radius)),
            CantorShape::ImaginaryAxis => None,
        }
    }

    /// Floating-point circle for rendering; the axis is oriented upward with
    /// the left half-plane inside, round circles bound their disks.
    pub fn to_circle(&self) -> Circle {
        match &self.shape {
            CantorShape::ImaginaryAxis => {
                Circle::line(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), true).expect("unit direction")
            }
            CantorShape::Round { center, radius } => {
                let c = center.to_f64().unwrap_or(f64::NAN);
                let r = radius.to_f64().unwrap_or(f64::NAN);
                Circle::disk(Complex64::new(c, 0.0), r).expect("positive radius")
            }
        }
    }
}

/// `C_k^i`, or the axis for `(0, 0)`.
pub fn circle(level: u32, index: i64) -> Result<CantorCircle, CantorError> {
    if level == 0 && index == 0 {
        return Ok(CantorCircle::axis());
    }
    Ok(CantorCircle::around(&interval(level, index)?))
}

/// `C_0^0` and all `C_k^i` with `1 ≤ k ≤ k_max`, plus the certificates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleFamily {
    k_max: u32,
    circles: Vec<CantorCircle>,
    certificate: DisjointnessCertificate,
}

impl CircleFamily {
    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// Sorted by level, then by position on the real axis.
    pub fn circles(&self) -> &[CantorCircle] {
        &self.circles
    }

    /// Circles of one level, left to right.
    pub fn level(&self, k: u32) -> &[CantorCircle] {
        if k == 0 {
            return &self.circles[..1];
        }
        if k > self.k_max {
            return &[];
        }
        let start = (1usize << k) - 1;
        &self.circles[start..start + (1usize << k)]
    }

    pub fn get(&self, id: CircleId) -> Option<&CantorCircle> {
        if id == CircleId::AXIS {
            return self.circles.first();
        }
        if id.level == 0 || id.level > self.k_max || id.index == 0 || id.index.abs() > 1 << (id.level - 1) {
            return None;
        }
        let half = 1i64 << (id.level - 1);
        let pos = if id.index < 0 { half + id.index } else { half + id.index - 1 };
        self.level(id.level).get(pos as usize)
    }

    pub fn certificate(&self) -> &DisjointnessCertificate {
        &self.certificate
    }
}

pub fn cantor_circles(k_max: u32) -> Result<CircleFamily, CantorError> {
    check_level(k_max)?;
    let count = (1u128 << (k_max + 1)) - 1;
    if count > LIST_BUDGET as u128 {
        return Err(CantorError::TooMany { level: k_max, count, budget: LIST_BUDGET });
    }
    let mut circles = vec![CantorCircle::axis()];
    let mut level = vec![interval(1, -1)?, interval(1, 1)?];
    for k in 1..=k_max {
        circles.extend(level.iter().map(CantorCircle::around));
        if k < k_max {
            level = next_level_sorted(&level);
        }
    }
    let certificate = certify_disjoint(&circles)?;
    Ok(CircleFamily { k_max, circles, certificate })
}

/// Children of a sorted level, again sorted left to right.
fn next_level_sorted(level: &[TriadicInterval]) -> Vec<TriadicInterval> {
    level
        .iter()
        .flat_map(|iv| {
            let [a, b] = iv.children();
            if a.left < b.left { [a, b] } else { [b, a] }
        })
        .collect()
}

/// `(5/3)·3^{-k}`.
pub fn radius_at_level(k: u32) -> BigRational {
    third_power(k) * BigRational::new(BigInt::from(5), BigInt::from(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn level_one_and_two() {
        let l1 = cantor_intervals(1).unwrap();
        assert_eq!(l1.len(), 2);
        assert_eq!((l1[0].index(), l1[0].left().clone(), l1[0].right().clone()), (-1, q(-1, 1), q(-1, 3)));
        assert_eq!((l1[1].index(), l1[1].left().clone(), l1[1].right().clone()), (1, q(1, 3), q(1, 1)));
        let l2 = cantor_intervals(2).unwrap();
        assert_eq!(l2.len(), 4);
        assert!(l2.iter().all(|iv| iv.length() == q(2, 9)));
        let last = l2.last().unwrap();
        assert_eq!((last.index(), last.left().clone(), last.right().clone()), (2, q(7, 9), q(1, 1)));
        let idx: Vec<i64> = l2.iter().map(|iv| iv.index()).collect();
        assert_eq!(idx, vec![-2, -1, 1, 2]);
    }

    /// Oracle: repeatedly cut out open middle thirds of [-1, 1] and label
    /// the surviving pieces by the index formula.
    #[test]
    fn matches_middle_third_recursion() {
        let mut pieces = vec![(q(-1, 1), q(1, 1))];
        for k in 1..=7u32 {
            pieces = pieces
                .into_iter()
                .flat_map(|(a, b)| {
                    let t = (&b - &a) / BigInt::from(3);
                    [(a.clone(), &a + &t), (&b - &t, b)]
                })
                .collect();
            let ivs = cantor_intervals(k).unwrap();
            assert_eq!(ivs.len(), pieces.len());
            for (iv, (a, b)) in ivs.iter().zip(&pieces) {
                assert_eq!((iv.left(), iv.right()), (a, b));
                assert_eq!(iv.length(), q(2, 1) * third_power(k));
                assert_eq!(&interval(k, iv.index()).unwrap(), iv);
            }
            let total: BigRational = ivs.iter().map(|iv| iv.length()).sum();
            assert_eq!(total, q(2, 1) * num_traits::pow(q(2, 3), k as usize));
        }
    }

    #[test]
    fn children_follow_index_formula() {
        for k in 1..=5u32 {
            for iv in cantor_intervals(k).unwrap() {
                let [a, b] = iv.children();
                let s = iv.index().signum();
                assert_eq!(a.index(), s * (2 * iv.index().abs() - 1));
                assert_eq!(b.index(), 2 * iv.index());
                assert_eq!(a, interval(k + 1, a.index()).unwrap());
                assert_eq!(b, interval(k + 1, b.index()).unwrap());
            }
        }
    }

    #[test]
    fn level_limits() {
        assert!(matches!(cantor_intervals(0), Err(CantorError::LevelLimit { .. })));
        assert!(matches!(cantor_intervals(41), Err(CantorError::LevelLimit { .. })));
        assert!(matches!(cantor_intervals(30), Err(CantorError::TooMany { .. })));
        // single intervals stay available up to the limit
        let deep = interval(40, -(1 << 39)).unwrap();
        assert_eq!(deep.left(), &q(-1, 1));
        assert_eq!(deep.length(), q(2, 1) * third_power(40));
        assert!(matches!(interval(3, 5), Err(CantorError::InvalidIndex { .. })));
    }

    #[test]
    fn circle_examples() {
        let c11 = circle(1, 1).unwrap();
        assert_eq!(c11.center(), Some(&q(2, 3)));
        assert_eq!(c11.radius(), Some(&q(5, 9)));
        assert_eq!(c11.center().unwrap() - c11.radius().unwrap(), q(1, 9));
        let c22 = circle(2, 2).unwrap();
        assert_eq!(c22.center(), Some(&q(8, 9)));
        assert_eq!(c22.radius(), Some(&q(5, 27)));
        let inner = (c22.center().unwrap() - c11.center().unwrap()).abs() + c22.radius().unwrap();
        assert_eq!(inner, q(11, 27));
        assert!(inner < q(15, 27));
        let c1m = circle(1, -1).unwrap();
        assert_eq!(c11.center().unwrap() - c1m.center().unwrap(), q(4, 3));
        assert!(q(4, 3) > c11.radius().unwrap() + c1m.radius().unwrap());
        for k in 1..=6 {
            assert!(cantor_intervals(k).unwrap().iter().all(|iv| CantorCircle::around(iv).radius() == Some(&radius_at_level(k))));
        }
    }

    #[test]
    fn family_lookup() {
        let fam = cantor_circles(4).unwrap();
        assert_eq!(fam.circles().len(), 31);
        for c in fam.circles() {
            assert_eq!(fam.get(c.id()), Some(c));
        }
        assert_eq!(fam.get(CircleId::new(5, 1)), None);
        let lvl3: Vec<i64> = fam.level(3).iter().map(|c| c.id().index).collect();
        assert_eq!(lvl3, vec![-4, -3, -2, -1, 1, 2, 3, 4]);
    }
}
