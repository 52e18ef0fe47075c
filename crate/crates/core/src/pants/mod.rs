//! Hyperbolic pairs of pants: boundary-to-boundary distances, collars, the
//! two infinite-genus surfaces built from pants with lengths `1, 1, 1/n!`,
//! the quasiconformal length-distortion obstruction between them, and the
//! surface `X_∞` glued from copies of one pair of pants.

mod spectrum;
mod surface;

use serde::Serialize;

pub use spectrum::{
    example1_spectra, example1_surface, factorial_length, spectrum_obstruction, wolpert_interval, CurveLabel,
    Example1, GenusContradiction, Interval, Length, LengthMode, LengthSpectrum, ObstructionEntry, ObstructionReport,
    SpectrumCurve, FLOAT_FACTORIAL_LIMIT,
};
pub use surface::{build_xinfty, build_xk, Gluing, GluedSurface, SlotRef};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PantsError {
    #[error("boundary length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("slots must be distinct and in 0..3, got {0} and {1}")]
    BadSlots(usize, usize),
    #[error("distortion constant must be at least 1, got {0}")]
    InvalidK(String),
    #[error("1/n! underflows double precision beyond n = {limit}; requested {requested}")]
    FloatOverflow { requested: u32, limit: u32 },
    #[error("curve {label} of length {length} has no admissible target")]
    EmptyTarget { label: String, length: String },
    #[error("gluing {0} joins slots of different lengths ({1} vs {2})")]
    LengthMismatch(String, f64, f64),
    #[error("slot {0} is used twice")]
    SlotReused(String),
    #[error("unknown pants {0}")]
    UnknownPants(i64),
    #[error("generation count must be at least 1")]
    NoGenerations,
}

/// Three boundary geodesic lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PantsSpec {
    lengths: [f64; 3],
}

impl PantsSpec {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self, PantsError> {
        for l in [l1, l2, l3] {
            if !(l.is_finite() && l > 0.0) {
                return Err(PantsError::InvalidLength(l));
            }
        }
        Ok(PantsSpec { lengths: [l1, l2, l3] })
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn length(&self, slot: usize) -> f64 {
        self.lengths[slot]
    }

    /// All three pairwise distances `[d01, d02, d12]`.
    pub fn distances(&self) -> [f64; 3] {
        [
            hexagon_distance(self, 0, 1).unwrap(),
            hexagon_distance(self, 0, 2).unwrap(),
            hexagon_distance(self, 1, 2).unwrap(),
        ]
    }
}

/// Length of the common perpendicular between boundary geodesics `i` and
/// `j`, from the right-angled hexagon relation
/// `cosh d = (cosh(ℓ_k/2) + cosh(ℓ_i/2) cosh(ℓ_j/2)) / (sinh(ℓ_i/2) sinh(ℓ_j/2))`.
pub fn hexagon_distance(p: &PantsSpec, i: usize, j: usize) -> Result<f64, PantsError> {
    if i == j || i > 2 || j > 2 {
        return Err(PantsError::BadSlots(i, j));
    }
    let k = 3 - i - j;
    let (a, b, c) = (p.lengths[i] / 2.0, p.lengths[j] / 2.0, p.lengths[k] / 2.0);
    // cosh d - 1 = (cosh c + cosh(a - b)) / (sinh a sinh b), free of cancellation
    let y = (c.cosh() + (a - b).cosh()) / (a.sinh() * b.sinh());
    Ok((y + (y * (y + 2.0)).sqrt()).ln_1p())
}

/// Half-width `arcsinh(1 / sinh(ℓ/2))` of the standard collar around a
/// simple closed geodesic of length `ℓ`.
pub fn collar_width(length: f64) -> Result<f64, PantsError> {
    if !(length.is_finite() && length > 0.0) {
        return Err(PantsError::InvalidLength(length));
    }
    Ok((1.0 / (length / 2.0).sinh()).asinh())
}

/// Lower bound `2 w(ℓ)` for the length of any geodesic arc crossing the
/// collar of a length-`ℓ` geodesic.
pub fn crossing_length_bound(length: f64) -> Result<f64, PantsError> {
    Ok(2.0 * collar_width(length)?)
}
