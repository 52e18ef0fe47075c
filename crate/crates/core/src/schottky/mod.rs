//! Schottky groups from paired disks: validation, free-group words, the
//! nested-disk tree approximating the limit set, and exhaustion counts.
//!
//! Disks are stored zero-based, so `D_1, D_2, …` of the usual notation are
//! `disks[0], disks[1], …` and generator `γ_i` (one-based) is
//! `generators[i - 1]`, pairing `disks[2i - 2]` with `disks[2i - 1]`.

mod exhaustion;
mod tree;
mod words;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::moebius::{Circle, CircleShape, MapKind, Moebius, MoebiusError, SpherePoint};

pub use exhaustion::{boundary_curve_count, copy_count, exhaustion_stats, exhaustion_stats_with_budget, ExhaustionLevel, ExhaustionStats};
pub use tree::{disk_images, limit_set, DiskNode, DiskTree, LimitSetStop, NodeId};
pub use words::{enumerate_words, reduced_word_count, GroupWord, Letter};

/// Gap or residual below which two circles count as touching / equal.
pub const CONTACT_TOL: f64 = 1e-9;

/// Default cap on the number of disk-tree nodes or enumerated words.
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SchottkyError {
    #[error("malformed Schottky data: {0}")]
    Shape(String),
    #[error("overlapping disk closures: {}", fmt_pairs(pairs))]
    Overlap { pairs: Vec<(usize, usize)> },
    #[error("generator {} does not map the exterior of D_{} onto the interior of D_{} (residual {residual:.3e})", generator + 1, 2 * generator + 1, 2 * generator + 2)]
    InvalidPairing { generator: usize, residual: f64 },
    #[error("tangency between D_{} and D_{} is not admissible: {reason}", pair.0 + 1, pair.1 + 1)]
    BadTangency { pair: (usize, usize), reason: String },
    #[error("requested {requested} nodes exceeds the budget of {budget}")]
    DepthLimit { requested: u128, budget: u64 },
    #[error("operation requires classical Schottky data")]
    NotClassical,
    #[error("disk D_{} is not a bounded round disk", index + 1)]
    UnboundedDisk { index: usize },
    #[error("child disk of word {word} leaves its parent (margin {margin:.3e})")]
    ContractionFailure { word: String, margin: f64 },
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

fn fmt_pairs(pairs: &[(usize, usize)]) -> String {
    pairs.iter().map(|(a, b)| format!("(D_{}, D_{})", a + 1, b + 1)).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Validity {
    Classical,
    TangentDegenerate {
        #[serde(with = "complex_pair")]
        witness: Complex64,
    },
    Invalid,
}

impl Validity {
    pub fn is_classical(&self) -> bool {
        matches!(self, Validity::Classical)
    }
}

/// Closed-disk separation for one pair of disks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairGap {
    pub first: usize,
    pub second: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingCheck {
    pub generator: usize,
    /// Mismatch between `γ_i(ext D_{2i-1})` and `int D_{2i}`.
    pub residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cusp {
    pub generator: usize,
    #[serde(with = "complex_pair")]
    pub fixed_point: Complex64,
}

/// Everything measured while classifying a configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigurationReport {
    pub validity: Validity,
    pub gaps: Vec<PairGap>,
    /// Smallest gap over all pairs of disks.
    pub min_gap: f64,
    /// Gap between the two disks of each generator, in generator order.
    pub paired_gaps: Vec<f64>,
    pub overlaps: Vec<(usize, usize)>,
    pub tangencies: Vec<(usize, usize)>,
    pub pairings: Vec<PairingCheck>,
    pub diagnostics: Vec<String>,
}

/// Validated Schottky data. Only `Classical` and `TangentDegenerate`
/// configurations can be constructed through [`build_schottky`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchottkyData {
    disks: Vec<Circle>,
    generators: Vec<Moebius>,
    report: ConfigurationReport,
}

impl SchottkyData {
    pub fn genus(&self) -> usize {
        self.generators.len()
    }

    pub fn disks(&self) -> &[Circle] {
        &self.disks
    }

    pub fn generators(&self) -> &[Moebius] {
        &self.generators
    }

    pub fn validity(&self) -> Validity {
        self.report.validity
    }

    pub fn report(&self) -> &ConfigurationReport {
        &self.report
    }

    /// `g` pairs of radius-0.4 disks centred at `∓(2j+1)` on the real axis,
    /// paired by hyperbolic maps.
    pub fn standard(genus: usize) -> Result<SchottkyData, SchottkyError> {
        let mut disks = Vec::with_capacity(2 * genus);
        let mut gens = Vec::with_capacity(genus);
        for j in 0..genus {
            let x = (2 * j + 1) as f64;
            let d1 = Circle::disk(Complex64::new(-x, 0.0), 0.4)?;
            let d2 = Circle::disk(Complex64::new(x, 0.0), 0.4)?;
            gens.push(pairing_map(&d1, &d2, std::f64::consts::PI)?);
            disks.push(d1);
            disks.push(d2);
        }
        build_schottky(disks, gens)
    }

    /// The `g = 2` configuration `D_1, D_2` at `∓3` and `D_3, D_4` at `∓1`,
    /// all of radius `1/2`, with twisted (loxodromic, non-hyperbolic) pairings.
    pub fn two_pair_example() -> Result<SchottkyData, SchottkyError> {
        let r = 0.5;
        let disks = vec![
            Circle::disk(Complex64::new(-3.0, 0.0), r)?,
            Circle::disk(Complex64::new(3.0, 0.0), r)?,
            Circle::disk(Complex64::new(-1.0, 0.0), r)?,
            Circle::disk(Complex64::new(1.0, 0.0), r)?,
        ];
        let gens = vec![pairing_map(&disks[0], &disks[1], 2.5)?, pairing_map(&disks[2], &disks[3], -2.0)?];
        build_schottky(disks, gens)
    }

    /// Genus-`g` configuration whose last pair `D_{2g-1}, D_{2g}` (radius 1/2
    /// at `∓1/2`) touch at `0`, with `γ_g` parabolic fixing `0`.
    pub fn tangent_example(genus: usize) -> Result<SchottkyData, SchottkyError> {
        let mut disks = Vec::with_capacity(2 * genus);
        let mut gens = Vec::with_capacity(genus);
        for j in 0..genus.saturating_sub(1) {
            let x = (2 * j + 3) as f64;
            let d1 = Circle::disk(Complex64::new(-x, 0.0), 0.4)?;
            let d2 = Circle::disk(Complex64::new(x, 0.0), 0.4)?;
            gens.push(pairing_map(&d1, &d2, std::f64::consts::PI)?);
            disks.push(d1);
            disks.push(d2);
        }
        let d1 = Circle::disk(Complex64::new(-0.5, 0.0), 0.5)?;
        let d2 = Circle::disk(Complex64::new(0.5, 0.0), 0.5)?;
        gens.push(pairing_map(&d1, &d2, std::f64::consts::PI)?);
        disks.push(d1);
        disks.push(d2);
        build_schottky(disks, gens)
    }
}

/// The map `z ↦ c₂ + e^{iθ} r₁ r₂ / (z − c₁)`, sending the exterior of the
/// round disk `from` onto the interior of `to`. `θ = π` gives a real
/// (hyperbolic) pairing for disks on the real axis.
pub fn pairing_map(from: &Circle, to: &Circle, twist: f64) -> Result<Moebius, SchottkyError> {
    let (c1, r1) = bounded(from, 0)?;
    let (c2, r2) = bounded(to, 1)?;
    let k = Complex64::from_polar(r1 * r2, twist);
    Ok(Moebius::new(c2, k - c1 * c2, Complex64::new(1.0, 0.0), -c1)?)
}

fn bounded(c: &Circle, index: usize) -> Result<(Complex64, f64), SchottkyError> {
    match c.shape() {
        CircleShape::Round { center, radius } if c.inside() => Ok((center, radius)),
        _ => Err(SchottkyError::UnboundedDisk { index }),
    }
}

/// How far apart two oriented circles are as curves-with-orientation, scaled
/// to the size of the data; `∞` when the shapes or orientations differ.
pub fn circle_mismatch(a: &Circle, b: &Circle) -> f64 {
    if a.inside() != b.inside() {
        return f64::INFINITY;
    }
    match (a.shape(), b.shape()) {
        (CircleShape::Round { center: c1, radius: r1 }, CircleShape::Round { center: c2, radius: r2 }) => {
            let s = 1.0 + c1.norm().max(r1);
            (c1 - c2).norm().max((r1 - r2).abs()) / s
        }
        (CircleShape::Line { point: p1, direction: d1 }, CircleShape::Line { point: p2, direction: d2 }) => {
            let offset = (d1.conj() * (p2 - p1)).im.abs();
            (d1 - d2).norm().max(offset / (1.0 + p1.norm()))
        }
        _ => f64::INFINITY,
    }
}

/// Measure gaps, tangencies and pairings and decide the validity class.
/// Fails only on malformed input (wrong counts); an invalid configuration is
/// reported, not rejected.
pub fn classify_configuration(disks: &[Circle], generators: &[Moebius]) -> Result<ConfigurationReport, SchottkyError> {
    let g = generators.len();
    if g < 2 {
        return Err(SchottkyError::Shape(format!("genus must be at least 2, got {g}")));
    }
    if disks.len() != 2 * g {
        return Err(SchottkyError::Shape(format!("{} generators need {} disks, got {}", g, 2 * g, disks.len())));
    }
    let mut gaps = Vec::new();
    let mut overlaps = Vec::new();
    let mut tangencies = Vec::new();
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let gap = disks[i].separation(&disks[j]);
            gaps.push(PairGap { first: i, second: j, gap });
            if gap < -CONTACT_TOL || gap.is_nan() {
                overlaps.push((i, j));
            } else if gap <= CONTACT_TOL {
                tangencies.push((i, j));
            }
        }
    }
    let min_gap = gaps.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
    let paired_gaps = (0..g).map(|i| disks[2 * i].separation(&disks[2 * i + 1])).collect();
    let pairings: Vec<PairingCheck> = generators
        .iter()
        .enumerate()
        .map(|(i, gamma)| {
            let image = gamma.map_circle(&disks[2 * i].complement());
            let residual = circle_mismatch(&image, &disks[2 * i + 1]);
            PairingCheck { generator: i, residual, ok: residual <= CONTACT_TOL }
        })
        .collect();

    let mut diagnostics = Vec::new();
    if !overlaps.is_empty() {
        diagnostics.push(format!("overlapping closures: {}", fmt_pairs(&overlaps)));
    }
    for p in pairings.iter().filter(|p| !p.ok) {
        diagnostics.push(format!(
            "generator {} fails to pair D_{} with D_{} (residual {:.3e})",
            p.generator + 1,
            2 * p.generator + 1,
            2 * p.generator + 2,
            p.residual
        ));
    }
    let mut validity = Validity::Invalid;
    if overlaps.is_empty() && pairings.iter().all(|p| p.ok) {
        match tangencies.as_slice() {
            [] => validity = Validity::Classical,
            [(i, j)] if (*i, *j) == (2 * g - 2, 2 * g - 1) => match tangent_witness(&disks[*i], &disks[*j], &generators[g - 1]) {
                Ok(z0) => validity = Validity::TangentDegenerate { witness: z0 },
                Err(reason) => diagnostics.push(reason),
            },
            _ => diagnostics.push(format!(
                "tangencies {} (only D_{}/D_{} may touch)",
                fmt_pairs(&tangencies),
                2 * g - 1,
                2 * g
            )),
        }
    }
    Ok(ConfigurationReport { validity, gaps, min_gap, paired_gaps, overlaps, tangencies, pairings, diagnostics })
}

fn tangent_witness(a: &Circle, b: &Circle, gamma: &Moebius) -> Result<Complex64, String> {
    let z0 = a.contact_point(b).ok_or_else(|| "no contact point".to_string())?;
    if a.distance_to_curve(z0) > CONTACT_TOL || b.distance_to_curve(z0) > CONTACT_TOL {
        return Err(format!("contact point {z0} is not on both circles"));
    }
    let class = gamma.classify();
    if class.kind != MapKind::Parabolic {
        return Err(format!("last generator is {:?}, not parabolic", class.kind));
    }
    let fixed = class.fixed_points[0];
    if fixed.chordal_distance(&SpherePoint::Finite(z0)) > CONTACT_TOL {
        return Err(format!("parabolic fixed point {fixed} differs from contact point {z0}"));
    }
    Ok(z0)
}

/// Validate and package Schottky data. Invalid configurations are errors:
/// overlaps take precedence over pairing failures.
pub fn build_schottky(disks: Vec<Circle>, generators: Vec<Moebius>) -> Result<SchottkyData, SchottkyError> {
    let report = classify_configuration(&disks, &generators)?;
    if report.validity == Validity::Invalid {
        if !report.overlaps.is_empty() {
            return Err(SchottkyError::Overlap { pairs: report.overlaps });
        }
        if let Some(p) = report.pairings.iter().find(|p| !p.ok) {
            return Err(SchottkyError::InvalidPairing { generator: p.generator, residual: p.residual });
        }
        let pair = report.tangencies.first().copied().unwrap_or((0, 1));
        let reason = report.diagnostics.join("; ");
        return Err(SchottkyError::BadTangency { pair, reason });
    }
    Ok(SchottkyData { disks, generators, report })
}

/// The parabolic generator and its fixed point, if some generator is parabolic.
pub fn detect_parabolic_cusp(s: &SchottkyData) -> Option<Cusp> {
    s.generators.iter().enumerate().find_map(|(i, gamma)| {
        let class = gamma.classify();
        match (class.kind, class.fixed_points.first()) {
            (MapKind::Parabolic, Some(SpherePoint::Finite(z))) => Some(Cusp { generator: i, fixed_point: *z }),
            _ => None,
        }
    })
}

/// On-disk form of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchottkyScene {
    pub genus: usize,
    pub disks: Vec<Circle>,
    pub generators: Vec<Moebius>,
}

impl SchottkyScene {
    pub fn build(self) -> Result<SchottkyData, SchottkyError> {
        if self.generators.len() != self.genus {
            return Err(SchottkyError::Shape(format!(
                "genus {} but {} generators",
                self.genus,
                self.generators.len()
            )));
        }
        build_schottky(self.disks, self.generators)
    }
}

impl From<&SchottkyData> for SchottkyScene {
    fn from(s: &SchottkyData) -> Self {
        SchottkyScene { genus: s.genus(), disks: s.disks.clone(), generators: s.generators.clone() }
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Classical => write!(f, "classical"),
            Validity::TangentDegenerate { witness } => write!(f, "tangent_degenerate at {witness}"),
            Validity::Invalid => write!(f, "invalid"),
        }
    }
}

pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}
