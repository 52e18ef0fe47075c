//! Round annuli as quotients of the half-plane, and the annulus map obtained
//! by projecting an equivariant extension.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::barycenter::{douady_earle_half_plane, DeOptions};
use super::boundary::BoundaryMap;
use super::extension::{extend_equivariant, ExtensionOptions};
use super::QcError;

const TWO_PI_SQ: f64 = 2.0 * PI * PI;

/// The paired parameter under `log r · log k = 2π²`. The pairing is an
/// involution, so this maps radii to multipliers and back.
pub fn annulus_moduli(x: f64) -> Result<f64, QcError> {
    if !(x.is_finite() && x > 1.0) {
        return Err(QcError::InvalidMultiplier { name: "modulus parameter", value: x });
    }
    let y = (TWO_PI_SQ / x.ln()).exp();
    if !y.is_finite() {
        return Err(QcError::InvalidMultiplier { name: "modulus parameter (paired value overflows)", value: x });
    }
    Ok(y)
}

/// Conformal modulus `log r / 2π` of `{1 < |z| < r}`.
pub fn annulus_modulus(r: f64) -> f64 {
    r.ln() / (2.0 * PI)
}

/// Conformal modulus `π / log k` of `H / ⟨z ↦ kz⟩`.
pub fn quotient_modulus(k: f64) -> f64 {
    PI / k.ln()
}

/// `A = {1 < |z| < r} ≃ H/⟨z ↦ kz⟩` and `B = {1 < |z| < ρ} ≃ H/⟨z ↦ κz⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusPair {
    pub k: f64,
    pub r: f64,
    pub kappa: f64,
    pub rho: f64,
}

impl AnnulusPair {
    pub fn from_multipliers(k: f64, kappa: f64) -> Result<Self, QcError> {
        Ok(AnnulusPair { k, r: annulus_moduli(k)?, kappa, rho: annulus_moduli(kappa)? })
    }

    pub fn from_radii(r: f64, rho: f64) -> Result<Self, QcError> {
        Ok(AnnulusPair { k: annulus_moduli(r)?, r, kappa: annulus_moduli(rho)?, rho })
    }

    /// Largest `|log r · log k - 2π²|` over the two annuli.
    pub fn relation_residual(&self) -> f64 {
        (self.r.ln() * self.k.ln() - TWO_PI_SQ).abs().max((self.rho.ln() * self.kappa.ln() - TWO_PI_SQ).abs())
    }
}

/// Covering `H → {1 < |w| < r}`, `z ↦ exp(-2πi log z / log k)`. The positive
/// axis goes to `|w| = 1`, the negative axis to `|w| = r`.
pub fn cover(z: Complex64, k: f64) -> Complex64 {
    (Complex64::new(0.0, -2.0 * PI / k.ln()) * z.ln()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusSample {
    pub source: Complex64,
    pub image: Complex64,
    pub dilatation: f64,
}

/// Boundary-trace agreement on one circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceCheck {
    pub samples: usize,
    /// `max |E(x e^{iε}) - Ψ(x)| / |Ψ(x)|`.
    pub max_lifted: f64,
    /// Same comparison after projecting both to `B`.
    pub max_projected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusReport {
    pub pair: AnnulusPair,
    pub samples: Vec<AnnulusSample>,
    pub sup_dilatation: f64,
    pub max_equivariance_residual: f64,
    /// Every sampled image lies in the closure of `B`.
    pub images_in_target: bool,
    /// `|w| = 1`, traced by the positive axis.
    pub inner_trace: TraceCheck,
    /// `|w| = r`, traced by the negative axis.
    pub outer_trace: TraceCheck,
    /// Dilatations of the two maps being joined across the annulus.
    pub piece_dilatations: (f64, f64),
    /// `max(K_1, K_2, sup K)` for the glued map.
    pub interpolation_bound: f64,
}

/// Angle of the boundary-trace probes above the real axis.
const TRACE_HEIGHT: f64 = 1e-9;
/// Barycenter residual accepted at the probes. A residual `r` moves the
/// solution by about `r` hyperbolically, i.e. `r · TRACE_HEIGHT · |x|` in
/// the plane, while rounding in `Ψ` at nodes that close together keeps the
/// attainable residual near `1e-10`.
const TRACE_TOL: f64 = 1e-6;

/// Project `E(Ψ)` to the annulus map `A → B` and check it against `Ψ` on
/// both boundary circles.
pub fn glue_annulus_map(
    psi: &BoundaryMap,
    pair: &AnnulusPair,
    opts: &ExtensionOptions,
    piece_dilatations: (f64, f64),
) -> Result<AnnulusReport, QcError> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b;
    if !close(psi.k(), pair.k) || !close(psi.kappa(), pair.kappa) {
        return Err(QcError::Mismatch(format!(
            "boundary map has (k, κ) = ({}, {}) but the annuli need ({}, {})",
            psi.k(),
            psi.kappa(),
            pair.k,
            pair.kappa
        )));
    }
    let grid = extend_equivariant(psi, opts)?;
    let samples: Vec<AnnulusSample> = grid
        .points
        .iter()
        .map(|p| AnnulusSample { source: cover(p.z, pair.k), image: cover(p.value, pair.kappa), dilatation: p.dilatation })
        .collect();
    let images_in_target = samples.iter().all(|s| {
        let m = s.image.norm();
        m >= 1.0 - 1e-9 && m <= pair.rho * (1.0 + 1e-9)
    });
    let f = |t: f64| psi.eval(t);
    let probe = DeOptions { tol: opts.de.tol.max(TRACE_TOL), ..opts.de };
    let trace = |sign: f64| -> Result<TraceCheck, QcError> {
        let mut check = TraceCheck { samples: 0, max_lifted: 0.0, max_projected: 0.0 };
        for i in 0..grid.n_s {
            let x = sign * (i as f64 * grid.h_s).exp();
            let z = Complex64::from_polar(x.abs(), if sign > 0.0 { TRACE_HEIGHT } else { PI - TRACE_HEIGHT });
            let e = douady_earle_half_plane(&f, z, &probe)?.value;
            let target = psi.eval(x);
            check.samples += 1;
            check.max_lifted = check.max_lifted.max((e - target).norm() / target.abs());
            let projected = (cover(e, pair.kappa) - cover(Complex64::new(target, 0.0), pair.kappa)).norm();
            check.max_projected = check.max_projected.max(projected);
        }
        Ok(check)
    };
    let (inner_trace, outer_trace) = (trace(1.0)?, trace(-1.0)?);
    Ok(AnnulusReport {
        pair: *pair,
        sup_dilatation: grid.sup_dilatation,
        max_equivariance_residual: grid.max_equivariance_residual,
        images_in_target,
        inner_trace,
        outer_trace,
        piece_dilatations,
        interpolation_bound: grid.sup_dilatation.max(piece_dilatations.0).max(piece_dilatations.1),
        samples,
    })
}
