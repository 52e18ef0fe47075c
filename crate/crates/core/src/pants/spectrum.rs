use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::surface::{Gluing, GluedSurface, SlotRef};
use super::{crossing_length_bound, PantsError, PantsSpec};

/// Largest `n` for which `1/n!` is computed in floating point.
pub const FLOAT_FACTORIAL_LIMIT: u32 = 170;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthMode {
    Exact,
    Float,
}

/// A hyperbolic length, exact when it came from rational data.
#[derive(Debug, Clone, PartialEq)]
pub enum Length {
    Exact(BigRational),
    Float(f64),
}

impl Length {
    pub fn integer(n: i64) -> Self {
        Length::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Length::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Length::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Length::Exact(_))
    }

    fn is_positive(&self) -> bool {
        match self {
            Length::Exact(q) => q.is_positive(),
            Length::Float(x) => *x > 0.0 && x.is_finite(),
        }
    }

    fn mul(&self, o: &Length) -> Length {
        match (self, o) {
            (Length::Exact(a), Length::Exact(b)) => Length::Exact(a * b),
            _ => Length::Float(self.to_f64() * o.to_f64()),
        }
    }

    fn div(&self, o: &Length) -> Length {
        match (self, o) {
            (Length::Exact(a), Length::Exact(b)) => Length::Exact(a / b),
            _ => Length::Float(self.to_f64() / o.to_f64()),
        }
    }

    /// Exact when both sides are exact, floating-point otherwise.
    pub fn compare(&self, o: &Length) -> Ordering {
        match (self, o) {
            (Length::Exact(a), Length::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&o.to_f64()).unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Exact(q) => write!(f, "{q}"),
            Length::Float(x) => write!(f, "{x}"),
        }
    }
}

/// `"3"` and `"3/2"` parse exactly, anything else as a float.
impl FromStr for Length {
    type Err = PantsError;

    fn from_str(s: &str) -> Result<Self, PantsError> {
        let s = s.trim();
        if let Ok(q) = s.parse::<BigRational>() {
            return Ok(Length::Exact(q));
        }
        s.parse::<f64>().map(Length::Float).map_err(|_| PantsError::InvalidK(s.to_string()))
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Length", 2)?;
        match self {
            Length::Exact(q) => st.serialize_field("exact", &q.to_string())?,
            Length::Float(_) => st.serialize_field("exact", &Option::<String>::None)?,
        }
        st.serialize_field("value", &self.to_f64())?;
        st.end()
    }
}

/// `1/n!`.
pub fn factorial_length(n: u32, mode: LengthMode) -> Result<Length, PantsError> {
    match mode {
        LengthMode::Exact => {
            let f: BigInt = (1..=n).map(BigInt::from).product();
            Ok(Length::Exact(BigRational::new(BigInt::one(), f)))
        }
        LengthMode::Float => {
            if n > FLOAT_FACTORIAL_LIMIT {
                return Err(PantsError::FloatOverflow { requested: n, limit: FLOAT_FACTORIAL_LIMIT });
            }
            let f: f64 = (1..=n).map(f64::from).product();
            Ok(Length::Float(1.0 / f))
        }
    }
}

/// `{a/K < x < K a}`, or the single point `{a}` when `K = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub lo: Length,
    pub hi: Length,
    pub closed: bool,
}

impl Interval {
    pub fn contains(&self, x: &Length) -> bool {
        let (lo, hi) = (self.lo.compare(x), x.compare(&self.hi));
        if self.closed {
            lo != Ordering::Greater && hi != Ordering::Greater
        } else {
            lo == Ordering::Less && hi == Ordering::Less
        }
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &Interval) -> bool {
        let lo = other.lo.compare(&self.lo);
        let hi = self.hi.compare(&other.hi);
        let inner_ok = |o: Ordering| o == Ordering::Less || (o == Ordering::Equal && (other.closed || !self.closed));
        inner_ok(lo) && inner_ok(hi)
    }
}

/// Lengths a curve of length `a` can have after a `K`-quasiconformal map.
pub fn wolpert_interval(a: &Length, k: &Length) -> Result<Interval, PantsError> {
    if !a.is_positive() {
        return Err(PantsError::InvalidLength(a.to_f64()));
    }
    match k.compare(&Length::integer(1)) {
        Ordering::Less => return Err(PantsError::InvalidK(k.to_string())),
        Ordering::Equal if !k.to_f64().is_nan() => return Ok(Interval { lo: a.clone(), hi: a.clone(), closed: true }),
        _ => {}
    }
    if k.to_f64().is_nan() {
        return Err(PantsError::InvalidK(k.to_string()));
    }
    Ok(Interval { lo: a.div(k), hi: a.mul(k), closed: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveLabel {
    /// The curve of length `a_n` between consecutive genus-one pieces.
    Alpha { n: u32 },
    /// The non-separating curve of the genus-one cap.
    Handle,
    /// One of the two length-1 curves inside the piece `T_t`.
    Inner { t: u32, which: u8 },
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveLabel::Alpha { n } => write!(f, "alpha_{n}"),
            CurveLabel::Handle => write!(f, "handle"),
            CurveLabel::Inner { t, which } => write!(f, "T{t}.{which}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCurve {
    pub label: CurveLabel,
    pub length: Length,
    /// Genus of the compact side of a separating curve.
    pub genus_inside: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthSpectrum {
    pub name: String,
    pub curves: Vec<SpectrumCurve>,
}

impl LengthSpectrum {
    pub fn alphas(&self) -> impl Iterator<Item = (u32, &SpectrumCurve)> {
        self.curves.iter().filter_map(|c| match c.label {
            CurveLabel::Alpha { n } => Some((n, c)),
            _ => None,
        })
    }

    pub fn alpha(&self, n: u32) -> Option<&SpectrumCurve> {
        self.alphas().find(|(m, _)| *m == n).map(|(_, c)| c)
    }
}

/// Which of the two surfaces: the first starts its chain of genus-one pieces
/// at `n = 0`, the second at `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Example1 {
    R1,
    R2,
}

impl Example1 {
    fn first_piece(self) -> u32 {
        match self {
            Example1::R1 => 0,
            Example1::R2 => 1,
        }
    }

    /// Genus of the compact side of `α_n`: the cap plus one per piece.
    pub fn genus_inside(self, n: u32) -> usize {
        1 + (n - self.first_piece()) as usize
    }

    fn name(self) -> &'static str {
        match self {
            Example1::R1 => "R1",
            Example1::R2 => "R2",
        }
    }
}

fn spectrum(which: Example1, n_max: u32, mode: LengthMode) -> Result<LengthSpectrum, PantsError> {
    let start = which.first_piece();
    let one = match mode {
        LengthMode::Exact => Length::integer(1),
        LengthMode::Float => Length::Float(1.0),
    };
    let mut curves = vec![SpectrumCurve { label: CurveLabel::Handle, length: one.clone(), genus_inside: None }];
    for n in start..=n_max {
        curves.push(SpectrumCurve {
            label: CurveLabel::Alpha { n },
            length: factorial_length(n, mode)?,
            genus_inside: Some(which.genus_inside(n)),
        });
        if n < n_max {
            for which in 0..2 {
                curves.push(SpectrumCurve { label: CurveLabel::Inner { t: n, which }, length: one.clone(), genus_inside: None });
            }
        }
    }
    Ok(LengthSpectrum { name: which.name().to_string(), curves })
}

/// Labelled curve lengths of both surfaces up to `α_{n_max}`.
pub fn example1_spectra(n_max: u32, mode: LengthMode) -> Result<(LengthSpectrum, LengthSpectrum), PantsError> {
    Ok((spectrum(Example1::R1, n_max, mode)?, spectrum(Example1::R2, n_max, mode)?))
}

/// The compact part of either surface bounded by `α_{n_max}` as glued pants
/// (float lengths). Pants `2t + 1`, `2t + 2` form the piece `T_t`; pants 0
/// is the cap.
pub fn example1_surface(which: Example1, n_max: u32) -> Result<GluedSurface, PantsError> {
    let start = which.first_piece();
    let a = |n: u32| factorial_length(n, LengthMode::Float).map(|l| l.to_f64());
    let spec = |n: u32| -> Result<PantsSpec, PantsError> { PantsSpec::new(1.0, 1.0, a(n)?) };
    let mut pants = vec![(0i64, spec(0)?)];
    let mut gluings = vec![Gluing { a: SlotRef::new(0, 0), b: SlotRef::new(0, 1) }];
    // the cap's third slot (length 1 = a_0 = a_1) meets the first piece
    let mut previous = SlotRef::new(0, 2);
    for t in start..n_max.max(start) {
        let (lo, hi) = (2 * t as i64 + 1, 2 * t as i64 + 2);
        pants.push((lo, spec(t)?));
        pants.push((hi, spec(t + 1)?));
        gluings.push(Gluing { a: SlotRef::new(lo, 0), b: SlotRef::new(hi, 0) });
        gluings.push(Gluing { a: SlotRef::new(lo, 1), b: SlotRef::new(hi, 1) });
        gluings.push(Gluing { a: previous, b: SlotRef::new(lo, 2) });
        previous = SlotRef::new(hi, 2);
    }
    GluedSurface::new(pants, gluings)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionEntry {
    pub n: u32,
    pub length: Length,
    pub interval: Interval,
    /// Indices `m` of target curves `α_m` with length in the interval.
    pub targets: Vec<u32>,
    /// Other target curves with length in the interval.
    pub other_curves: Vec<CurveLabel>,
    pub forced: Option<u32>,
    pub source_genus: Option<usize>,
    pub target_genus: Option<usize>,
    /// `2 w(a_n)`: any curve crossing `α_n` is at least this long.
    pub crossing_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenusContradiction {
    pub n: u32,
    pub target: u32,
    pub source_genus: usize,
    pub target_genus: usize,
}

/// Chain of checks for one distortion constant `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub source: String,
    pub target: String,
    pub k: Length,
    pub exact: bool,
    pub entries: Vec<ObstructionEntry>,
    pub contradictions: Vec<GenusContradiction>,
    pub obstructed: bool,
    /// Steps taken as given rather than computed.
    pub assumptions: Vec<String>,
}

impl ObstructionReport {
    pub fn entry(&self, n: u32) -> Option<&ObstructionEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    /// Curves whose only admissible target is forced.
    pub fn forced(&self) -> Vec<(u32, u32)> {
        self.entries.iter().filter_map(|e| e.forced.map(|m| (e.n, m))).collect()
    }
}

/// For each distinguished curve of `s1`, find the distinguished curves of
/// `s2` whose length a `K`-quasiconformal map could produce, and flag forced
/// targets whose compact sides have different genus.
pub fn spectrum_obstruction(s1: &LengthSpectrum, s2: &LengthSpectrum, k: &Length) -> Result<ObstructionReport, PantsError> {
    let sources: Vec<(u32, &SpectrumCurve)> = s1.alphas().collect();
    let targets: Vec<(u32, &SpectrumCurve)> = s2.alphas().collect();
    let entries: Vec<ObstructionEntry> = sources
        .par_iter()
        .map(|(n, c)| {
            let interval = wolpert_interval(&c.length, k)?;
            let hits: Vec<u32> = targets.iter().filter(|(_, t)| interval.contains(&t.length)).map(|(m, _)| *m).collect();
            let other_curves = s2
                .curves
                .iter()
                .filter(|t| !matches!(t.label, CurveLabel::Alpha { .. }) && interval.contains(&t.length))
                .map(|t| t.label)
                .collect();
            let forced = (hits.len() == 1).then(|| hits[0]);
            let target_genus = forced.and_then(|m| s2.alpha(m)).and_then(|t| t.genus_inside);
            Ok(ObstructionEntry {
                n: *n,
                length: c.length.clone(),
                interval,
                targets: hits,
                other_curves,
                forced,
                source_genus: c.genus_inside,
                target_genus,
                crossing_bound: crossing_length_bound(c.length.to_f64())?,
            })
        })
        .collect::<Result<_, PantsError>>()?;
    if let Some(e) = entries.iter().find(|e| e.targets.is_empty()) {
        return Err(PantsError::EmptyTarget { label: CurveLabel::Alpha { n: e.n }.to_string(), length: e.length.to_string() });
    }
    let contradictions: Vec<GenusContradiction> = entries
        .iter()
        .filter_map(|e| match (e.forced, e.source_genus, e.target_genus) {
            (Some(m), Some(g1), Some(g2)) if g1 != g2 => {
                Some(GenusContradiction { n: e.n, target: m, source_genus: g1, target_genus: g2 })
            }
            _ => None,
        })
        .collect();
    let exact = k.is_exact() && entries.iter().all(|e| e.length.is_exact());
    Ok(ObstructionReport {
        source: s1.name.clone(),
        target: s2.name.clone(),
        k: k.clone(),
        exact,
        obstructed: !contradictions.is_empty(),
        entries,
        contradictions,
        assumptions: vec![
            "the image of each distinguished curve is homotopic to a distinguished curve of the target; \
             crossing classes are excluded only through crossing_bound, not formally"
                .to_string(),
            "a forced target maps the compact side of the source curve onto the compact side of the target curve"
                .to_string(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Length {
        Length::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn lengths_parse_exactly_when_rational() {
        assert_eq!("3/2".parse::<Length>().unwrap(), Length::Exact(BigRational::new(BigInt::from(3), BigInt::from(2))));
        assert_eq!(" 4 ".parse::<Length>().unwrap(), Length::integer(4));
        assert_eq!("1.5".parse::<Length>().unwrap(), Length::Float(1.5));
        assert!("two".parse::<Length>().is_err());
    }

    #[test]
    fn factorial_lengths() {
        assert_eq!(factorial_length(3, LengthMode::Exact).unwrap(), q(1, 6));
        assert_eq!(factorial_length(4, LengthMode::Exact).unwrap(), q(1, 24));
        assert_eq!(factorial_length(0, LengthMode::Exact).unwrap(), q(1, 1));
        assert!(matches!(factorial_length(171, LengthMode::Float), Err(PantsError::FloatOverflow { .. })));
        assert!(factorial_length(170, LengthMode::Float).unwrap().to_f64() > 0.0);
        let Length::Exact(big) = factorial_length(200, LengthMode::Exact).unwrap() else { panic!() };
        assert!(big.is_positive());
        for n in 0..30 {
            let (Length::Exact(a), Length::Exact(b)) =
                (factorial_length(n, LengthMode::Exact).unwrap(), factorial_length(n + 1, LengthMode::Exact).unwrap())
            else {
                panic!()
            };
            assert_eq!(a / b, BigRational::from_integer(BigInt::from(n + 1)));
        }
    }

    #[test]
    fn wolpert_examples() {
        let i = wolpert_interval(&q(1, 6), &Length::integer(2)).unwrap();
        assert_eq!((i.lo.clone(), i.hi.clone(), i.closed), (q(1, 12), q(1, 3), false));
        assert!(!i.contains(&q(1, 3)) && i.contains(&q(1, 4)));
        let point = wolpert_interval(&q(1, 6), &Length::integer(1)).unwrap();
        assert!(point.closed && point.contains(&q(1, 6)) && !point.contains(&q(1, 7)));
        for n in 2..15u32 {
            let a = factorial_length(n, LengthMode::Exact).unwrap();
            let i = wolpert_interval(&a, &Length::integer(n as i64)).unwrap();
            assert_eq!(i.hi, factorial_length(n - 1, LengthMode::Exact).unwrap());
        }
        assert!(wolpert_interval(&q(1, 6), &q(1, 2)).is_err());
        assert!(wolpert_interval(&q(0, 1), &Length::integer(2)).is_err());
    }

    #[test]
    fn spectra_structure() {
        let (r1, r2) = example1_spectra(6, LengthMode::Exact).unwrap();
        assert_eq!(r1.alphas().count(), 7);
        assert_eq!(r2.alphas().count(), 6);
        for n in 1..=6 {
            assert_eq!(r1.alpha(n).unwrap().genus_inside, Some(n as usize + 1));
            assert_eq!(r2.alpha(n).unwrap().genus_inside, Some(n as usize));
        }
        for c in r1.curves.iter().chain(&r2.curves) {
            if !matches!(c.label, CurveLabel::Alpha { .. }) {
                assert_eq!(c.length, Length::integer(1));
            }
        }
    }

    #[test]
    fn genus_metadata_matches_glued_surfaces() {
        for n in 1..=10 {
            let s1 = example1_surface(Example1::R1, n).unwrap();
            let s2 = example1_surface(Example1::R2, n).unwrap();
            assert_eq!(s1.boundary_count(), 1);
            assert_eq!(s2.boundary_count(), 1);
            assert_eq!(s1.genus(), Some(Example1::R1.genus_inside(n)));
            assert_eq!(s2.genus(), Some(Example1::R2.genus_inside(n)));
            let free = s1.free_slots()[0];
            let len = s1.pants().find(|(p, _)| *p == free.pants).unwrap().1.length(free.slot as usize);
            assert_eq!(len, factorial_length(n, LengthMode::Float).unwrap().to_f64());
        }
    }

    #[test]
    fn forced_target_example() {
        let (r1, r2) = example1_spectra(25, LengthMode::Exact).unwrap();
        let rep = spectrum_obstruction(&r1, &r2, &Length::integer(2)).unwrap();
        let e3 = rep.entry(3).unwrap();
        assert_eq!(e3.targets, vec![3]);
        assert_eq!((e3.source_genus, e3.target_genus), (Some(4), Some(3)));
        assert!(rep.obstructed);
        assert!(rep.exact);
    }

    #[test]
    fn identical_spectra_conformal() {
        let (r1, _) = example1_spectra(8, LengthMode::Exact).unwrap();
        let rep = spectrum_obstruction(&r1, &r1, &Length::integer(1)).unwrap();
        assert!(!rep.obstructed);
        assert!(rep.entries.iter().all(|e| e.forced == Some(e.n) || e.n <= 1));
    }

    #[test]
    fn empty_target_is_an_error() {
        let (r1, r2) = example1_spectra(10, LengthMode::Exact).unwrap();
        let short = LengthSpectrum { name: "short".into(), curves: r2.curves.into_iter().take(3).collect() };
        assert!(matches!(spectrum_obstruction(&r1, &short, &Length::integer(2)), Err(PantsError::EmptyTarget { .. })));
    }
}
