//! The Douady-Earle extension of an equivariant boundary map sampled over a
//! fundamental domain of `z ↦ kz`, with its Beltrami coefficient.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::barycenter::{douady_earle_half_plane, DeOptions};
use super::boundary::BoundaryMap;
use super::QcError;

/// Default level at or above which `|μ|` is reported as a breach of
/// quasiconformality.
pub const BREACH_LEVEL: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtensionOptions {
    /// Cells per direction of the log-polar grid.
    pub grid: usize,
    pub de: DeOptions,
    pub breach_level: f64,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions { grid: 32, de: DeOptions::default(), breach_level: BREACH_LEVEL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    /// `z = e^{s + iθ}`.
    pub s: f64,
    pub theta: f64,
    pub z: Complex64,
    pub value: Complex64,
    /// Largest barycenter residual among the solves at this point.
    pub residual: f64,
    /// `|E(kz) - κE(z)|`, both solved directly.
    pub equivariance: f64,
    pub mu: Complex64,
    pub dilatation: f64,
}

/// Samples of `E(Ψ)` on `{1 ≤ |z| < k} ∩ H`. Row-major: `s` outer, `θ` inner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionGrid {
    pub k: f64,
    pub kappa: f64,
    pub n_s: usize,
    pub n_theta: usize,
    pub h_s: f64,
    pub h_theta: f64,
    /// Difference step at `z`, relative to `|z|`.
    pub step: f64,
    pub points: Vec<GridPoint>,
    pub sup_mu: f64,
    pub sup_dilatation: f64,
    pub max_equivariance_residual: f64,
    pub max_equivariance_relative: f64,
    pub max_barycenter_residual: f64,
    pub breach: bool,
    pub breach_cells: usize,
}

impl ExtensionGrid {
    pub fn at(&self, i: usize, j: usize) -> &GridPoint {
        &self.points[i * self.n_theta + j]
    }
}

pub fn dilatation(mu: Complex64) -> f64 {
    let m = mu.norm();
    if m >= 1.0 { f64::INFINITY } else { (1.0 + m) / (1.0 - m) }
}

/// `μ = w_z̄ / w_z` from central differences of step `h` along both axes:
/// `[w(z+h), w(z-h), w(z+ih), w(z-ih)]`. Exact for `w = az + bz̄ + c`.
pub fn beltrami_central(stencil: [Complex64; 4], h: f64) -> Complex64 {
    let w_x = (stencil[0] - stencil[1]) / (2.0 * h);
    let w_y = (stencil[2] - stencil[3]) / (2.0 * h);
    let w_z = (w_x - Complex64::i() * w_y) / 2.0;
    let w_zbar = (w_x + Complex64::i() * w_y) / 2.0;
    w_zbar / w_z
}

/// Grid over the fundamental annulus: `s_i = i ln k / n`, `θ_j = (j + 1/2)π / n`.
pub fn fundamental_grid(k: f64, n: usize) -> (f64, f64, Vec<(f64, f64)>) {
    let (h_s, h_theta) = (k.ln() / n as f64, PI / n as f64);
    let pts = (0..n).flat_map(|i| (0..n).map(move |j| (i as f64 * h_s, (j as f64 + 0.5) * h_theta))).collect();
    (h_s, h_theta, pts)
}

/// `E(Ψ)` over the fundamental annulus, with equivariance residuals and the
/// Beltrami coefficient per cell.
///
/// The difference step at `z` is a quarter of the local grid spacing
/// `|z| min(h_s, h_θ)`, which keeps every stencil inside `H`.
pub fn extend_equivariant(psi: &BoundaryMap, opts: &ExtensionOptions) -> Result<ExtensionGrid, QcError> {
    if opts.grid < 4 {
        return Err(QcError::Grid(format!("extension grid needs at least 4 cells per direction, got {}", opts.grid)));
    }
    let (k, kappa, n) = (psi.k(), psi.kappa(), opts.grid);
    let (h_s, h_theta, coords) = fundamental_grid(k, n);
    let step = h_s.min(h_theta) / 4.0;
    let f = |t: f64| psi.eval(t);
    let points: Vec<GridPoint> = coords
        .par_iter()
        .map(|&(s, theta)| {
            let z = Complex64::from_polar(s.exp(), theta);
            let h = step * z.norm();
            let solve = |p: Complex64| douady_earle_half_plane(&f, p, &opts.de);
            let e = solve(z)?;
            let ek = solve(z * k)?;
            let mut residual = e.residual.max(ek.residual);
            let mut stencil = [Complex64::default(); 4];
            let offsets = [Complex64::new(h, 0.0), Complex64::new(-h, 0.0), Complex64::new(0.0, h), Complex64::new(0.0, -h)];
            for (slot, d) in stencil.iter_mut().zip(offsets) {
                let v = solve(z + d)?;
                residual = residual.max(v.residual);
                *slot = v.value;
            }
            let mu = beltrami_central(stencil, h);
            Ok(GridPoint {
                s,
                theta,
                z,
                value: e.value,
                residual,
                equivariance: (ek.value - e.value * kappa).norm(),
                mu,
                dilatation: dilatation(mu),
            })
        })
        .collect::<Result<_, QcError>>()?;
    let sup = |f: &dyn Fn(&GridPoint) -> f64| points.iter().map(f).fold(0.0, f64::max);
    let breach_cells = points.iter().filter(|p| p.mu.norm() >= opts.breach_level).count();
    Ok(ExtensionGrid {
        k,
        kappa,
        n_s: n,
        n_theta: n,
        h_s,
        h_theta,
        step,
        sup_mu: sup(&|p| p.mu.norm()),
        sup_dilatation: sup(&|p| p.dilatation),
        max_equivariance_residual: sup(&|p| p.equivariance),
        max_equivariance_relative: sup(&|p| p.equivariance / (kappa * p.value.norm())),
        max_barycenter_residual: sup(&|p| p.residual),
        breach: breach_cells > 0,
        breach_cells,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_differences_are_exact_on_affine_maps() {
        let c = Complex64::new(0.3, -0.2);
        let w = |z: Complex64| Complex64::new(1.5, 0.5) * z + c * z.conj() + 2.0;
        let (z, h) = (Complex64::new(0.7, 1.9), 0.01);
        let st = [w(z + h), w(z - h), w(z + Complex64::i() * h), w(z - Complex64::i() * h)];
        let expected = c / Complex64::new(1.5, 0.5);
        assert!((beltrami_central(st, h) - expected).norm() < 1e-12);
        assert_eq!(dilatation(Complex64::new(1.0, 0.0)), f64::INFINITY);
    }

    #[test]
    fn identity_extension_is_conformal() {
        let psi = BoundaryMap::identity(2.0).unwrap();
        let g = extend_equivariant(&psi, &ExtensionOptions { grid: 8, ..Default::default() }).unwrap();
        assert!(g.sup_mu < 1e-6, "{}", g.sup_mu);
        assert!((g.sup_dilatation - 1.0).abs() < 1e-5);
        assert!(g.max_equivariance_residual < 1e-9);
        for p in &g.points {
            assert!((p.value - p.z).norm() < 1e-9);
        }
        assert!(!g.breach);
    }

    #[test]
    fn power_map_extension() {
        let psi = BoundaryMap::power(2.0, 2.0).unwrap();
        let g = extend_equivariant(&psi, &ExtensionOptions { grid: 8, ..Default::default() }).unwrap();
        assert!(g.max_equivariance_residual < 1e-6);
        assert!(g.sup_mu < 0.9 && g.sup_dilatation.is_finite());
        assert!(g.points.iter().all(|p| p.value.im > 0.0));
    }

    /// Samples `1 + (κ-1)(e^{λu} - 1)/(e^λ - 1)` flatten exponentially near
    /// `x = 1` as `λ` grows.
    fn flattening(lambda: f64) -> BoundaryMap {
        let (k, kappa) = (2.0, 4.0);
        let pts: Vec<(f64, f64)> = (0..=32)
            .map(|i| {
                let u = i as f64 / 32.0;
                (1.0 + (k - 1.0) * u, 1.0 + (kappa - 1.0) * (lambda * u).exp_m1() / lambda.exp_m1())
            })
            .collect();
        BoundaryMap::from_samples(k, kappa, &pts, None).unwrap()
    }

    #[test]
    fn distortion_drives_mu_towards_one() {
        let psi = flattening(20.0);
        let de = DeOptions { tol: 1e-8, ..Default::default() };
        let sups: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&grid| {
                let g = extend_equivariant(&psi, &ExtensionOptions { grid, de, breach_level: 0.99 }).unwrap();
                assert!(g.breach && g.breach_cells > 0, "{grid}: {}", g.sup_mu);
                g.sup_mu
            })
            .collect();
        assert!(sups[2] > sups[0]);
        let mild = extend_equivariant(&BoundaryMap::power(2.0, 2.0).unwrap(), &ExtensionOptions { grid: 4, ..Default::default() }).unwrap();
        assert!(!mild.breach);
    }
}
