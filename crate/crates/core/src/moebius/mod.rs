//! Möbius transformations of the Riemann sphere.
//!
//! Matrices are kept in `SL(2, C)`: every constructor divides by a square root
//! of the determinant, so `ad - bc = 1` up to rounding. A transformation and its
//! negative act identically, so comparisons go through [`Moebius::approx_eq`],
//! which identifies `M` with `-M`.

mod circle;
pub mod exact;

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use circle::{map_circle, Circle, CircleShape};

/// Matrices whose determinant is smaller than this are rejected.
pub const DEGENERATE_DET: f64 = 1e-14;

/// `|tr^2 - 4|` below this classifies a non-identity map as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-9;

/// Off-diagonal size below which a normalized matrix is treated as diagonal.
const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("degenerate matrix: |ad - bc| = {det:e} is below {DEGENERATE_DET:e}")]
    DegenerateMatrix { det: f64 },
    #[error("non-finite coordinate {0}")]
    NonFinite(Complex64),
    #[error("invalid circle: {0}")]
    InvalidCircle(String),
}

/// A point of the Riemann sphere: a finite complex number or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    /// A finite point; NaN or infinite components are rejected.
    pub fn finite(z: Complex64) -> Result<Self, MoebiusError> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(SpherePoint::Finite(z))
        } else {
            Err(MoebiusError::NonFinite(z))
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Chordal distance on the unit-diameter-two sphere, `2|z-w| / sqrt((1+|z|²)(1+|w|²))`.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        match (*self, *other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }

    /// Maps overflowed values to `∞`; used for results of arithmetic.
    pub(crate) fn from_computed(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SpherePoint::Infinity => write!(f, "∞"),
        }
    }
}

/// Conjugacy type of a transformation, read off from the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

/// Classification result. The identity has an empty fixed-point list, a
/// parabolic map exactly one fixed point, the others two.
#[derive(Debug, Clone, PartialEq)]
pub struct MapClass {
    pub kind: MapKind,
    pub fixed_points: Vec<SpherePoint>,
    pub trace_squared: Complex64,
}

/// `z ↦ (az + b) / (cz + d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MoebiusRepr", into = "MoebiusRepr")]
pub struct Moebius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Moebius {
    /// Builds and normalizes to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, MoebiusError> {
        for z in [a, b, c, d] {
            SpherePoint::finite(z)?;
        }
        let det = a * d - b * c;
        if det.norm() < DEGENERATE_DET {
            return Err(MoebiusError::DegenerateMatrix { det: det.norm() });
        }
        let s = det.sqrt();
        Ok(Moebius { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Moebius { a: one, b: zero, c: zero, d: one }
    }

    /// `z ↦ z + t`.
    pub fn translation(t: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Moebius { a: one, b: t, c: Complex64::new(0.0, 0.0), d: one }
    }

    /// `z ↦ λz`.
    pub fn scaling(lambda: Complex64) -> Result<Self, MoebiusError> {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(lambda, zero, zero, Complex64::new(1.0, 0.0))
    }

    /// `z ↦ 1/z`.
    pub fn reciprocal() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(zero, one, one, zero).expect("determinant -1")
    }

    /// Disk automorphism `z ↦ e^{iθ} (z - p) / (1 - p̄ z)` for `|p| < 1`.
    pub fn disk_automorphism(p: Complex64, theta: f64) -> Result<Self, MoebiusError> {
        if p.norm() >= 1.0 {
            return Err(MoebiusError::InvalidCircle(format!("disk automorphism centre {p} is not inside the unit disk")));
        }
        let rot = Complex64::from_polar(1.0, theta);
        Self::new(rot, -rot * p, -p.conj(), Complex64::new(1.0, 0.0))
    }

    /// Cayley map `z ↦ (z - i) / (z + i)` sending the upper half-plane onto the unit disk.
    pub fn cayley() -> Self {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, -i, one, i).expect("determinant 2i")
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn trace_squared(&self) -> Complex64 {
        let t = self.trace();
        t * t
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        let (u, v) = (self, other);
        let a = u.a * v.a + u.b * v.c;
        let b = u.a * v.b + u.b * v.d;
        let c = u.c * v.a + u.d * v.c;
        let d = u.c * v.b + u.d * v.d;
        // Product of unimodular matrices; only rounding drift is removed here.
        // With large entries `ad - bc` is all cancellation, so it is only
        // trusted while `|ad| + |bc|` is moderate.
        if (a * d).norm() + (b * c).norm() > 1e6 {
            return Moebius { a, b, c, d };
        }
        let s = (a * d - b * c).sqrt();
        Moebius { a: a / s, b: b / s, c: c / s, d: d / s }
    }

    pub fn inverse(&self) -> Moebius {
        Moebius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Moebius) -> Moebius {
        g.compose(self).compose(&g.inverse())
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from_computed(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from_computed((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Convenience for finite arguments.
    pub fn apply_finite(&self, z: Complex64) -> SpherePoint {
        self.apply(SpherePoint::Finite(z))
    }

    /// The point sent to `∞`.
    pub fn pole(&self) -> SpherePoint {
        if self.c == Complex64::new(0.0, 0.0) {
            SpherePoint::Infinity
        } else {
            SpherePoint::from_computed(-self.d / self.c)
        }
    }

    /// Entrywise comparison modulo the sign ambiguity of `PSL(2, C)`.
    pub fn approx_eq(&self, other: &Moebius, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Max-entry distance between the two lifts, minimized over sign.
    pub fn distance(&self, other: &Moebius) -> f64 {
        let p = self.entries();
        let q = other.entries();
        let same = (0..4).map(|i| (p[i] - q[i]).norm()).fold(0.0, f64::max);
        let flipped = (0..4).map(|i| (p[i] + q[i]).norm()).fold(0.0, f64::max);
        same.min(flipped)
    }

    fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Classify by trace and compute fixed points.
    pub fn classify(&self) -> MapClass {
        let tr2 = self.trace_squared();
        let near_four = (tr2 - 4.0).norm() < PARABOLIC_TOL;
        let scale = self.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
        let diagonal_scalar = self.b.norm() <= IDENTITY_TOL * scale
            && self.c.norm() <= IDENTITY_TOL * scale
            && (self.a - self.d).norm() <= IDENTITY_TOL * scale;
        let kind = if near_four && diagonal_scalar {
            MapKind::Identity
        } else if near_four {
            MapKind::Parabolic
        } else if tr2.im.abs() < PARABOLIC_TOL && tr2.re >= 0.0 && tr2.re < 4.0 {
            MapKind::Elliptic
        } else {
            MapKind::Loxodromic
        };
        let fixed_points = match kind {
            MapKind::Identity => Vec::new(),
            _ => self.solve_fixed_points(kind == MapKind::Parabolic),
        };
        MapClass { kind, fixed_points, trace_squared: tr2 }
    }

    /// Roots of `c z² + (d - a) z - b = 0` on the sphere.
    fn solve_fixed_points(&self, parabolic: bool) -> Vec<SpherePoint> {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let scale = self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diff = d - a;
        if c.norm() <= 1e-14 * scale {
            if parabolic || diff.norm() <= 1e-14 * scale {
                return vec![SpherePoint::Infinity];
            }
            return vec![SpherePoint::Infinity, SpherePoint::from_computed(b / diff)];
        }
        if parabolic {
            return vec![SpherePoint::from_computed((a - d) / (c * 2.0))];
        }
        let disc = (self.trace_squared() - 4.0).sqrt();
        // Stable quadratic formula with A = c, B = d - a, C = -b.
        let sign = if (diff.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
        let q = -(diff + disc * sign) * 0.5;
        let z1 = q / c;
        let z2 = if q.norm() == 0.0 { SpherePoint::Infinity } else { SpherePoint::from_computed(-b / q) };
        vec![SpherePoint::from_computed(z1), z2]
    }

    /// Image of an oriented circle; see [`map_circle`].
    pub fn map_circle(&self, circle: &Circle) -> Circle {
        map_circle(self, circle)
    }
}

impl Mul for Moebius {
    type Output = Moebius;
    fn mul(self, rhs: Moebius) -> Moebius {
        self.compose(&rhs)
    }
}

impl Mul for &Moebius {
    type Output = Moebius;
    fn mul(self, rhs: &Moebius) -> Moebius {
        self.compose(rhs)
    }
}

/// Free-function form of [`Moebius::compose`].
pub fn compose(f: &Moebius, g: &Moebius) -> Moebius {
    f.compose(g)
}

/// Free-function form of [`Moebius::classify`].
pub fn classify(f: &Moebius) -> MapClass {
    f.classify()
}

/// Classify an unnormalized matrix, rejecting degenerate ones.
pub fn classify_matrix(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<MapClass, MoebiusError> {
    Ok(Moebius::new(a, b, c, d)?.classify())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoebiusRepr {
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl TryFrom<MoebiusRepr> for Moebius {
    type Error = MoebiusError;
    fn try_from(r: MoebiusRepr) -> Result<Self, Self::Error> {
        Moebius::new(unpair(r.a), unpair(r.b), unpair(r.c), unpair(r.d))
    }
}

impl From<Moebius> for MoebiusRepr {
    fn from(m: Moebius) -> Self {
        MoebiusRepr { a: pair(m.a), b: pair(m.b), c: pair(m.c), d: pair(m.d) }
    }
}
