//! Conformal barycenters and the Douady-Earle extension.
//!
//! The barycenter of points `η_j` on the unit circle is the `w` in the disk
//! where the mean of `T_w(η) = (η - w)/(1 - w̄η)` vanishes. It is Möbius
//! natural, so the extension inherits naturality from the quadrature alone.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QcError;

pub const MIN_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeOptions {
    /// Quadrature nodes for harmonic measure.
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions { nodes: 1024, tol: 1e-10, max_iter: 200 }
    }
}

impl DeOptions {
    fn check(&self) -> Result<(), QcError> {
        if self.nodes < MIN_NODES {
            return Err(QcError::TooFewNodes { nodes: self.nodes, min: MIN_NODES });
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(QcError::Grid(format!("tolerance and iteration cap must be positive, got {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeValue {
    pub value: Complex64,
    /// `|mean T_w(η)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

fn to_frame(eta: Complex64, w: Complex64) -> Complex64 {
    (eta - w) / (Complex64::new(1.0, 0.0) - w.conj() * eta)
}

fn from_frame(delta: Complex64, w: Complex64) -> Complex64 {
    (delta + w) / (Complex64::new(1.0, 0.0) + w.conj() * delta)
}

/// Newton iteration shared by the disk and half-plane models. `moments(w)`
/// returns the means of the frame coordinates `τ_w(η)` and `τ_w(η)²`;
/// `step(w, δ)` is the point with `τ_w = δ`.
///
/// `δ` solves the linearized equation `δ - S δ̄ = B`; steps are capped and
/// halved until the residual drops. When `1 - |S|²` degenerates the step
/// falls back to the damped fixed point `δ = B/2`.
fn solve(
    start: Complex64,
    moments: impl Fn(Complex64) -> (Complex64, Complex64),
    step: impl Fn(Complex64, Complex64) -> Complex64,
    opts: &DeOptions,
) -> Result<DeValue, QcError> {
    let mut w = start;
    let (mut b, mut s) = moments(w);
    for it in 0..opts.max_iter {
        if b.norm() < opts.tol {
            return Ok(DeValue { value: w, residual: b.norm(), iterations: it });
        }
        let det = 1.0 - s.norm_sqr();
        let mut delta = if det > 1e-12 { (b + s * b.conj()) / det } else { b * 0.5 };
        if delta.norm() > 0.5 {
            delta *= 0.5 / delta.norm();
        }
        let mut accepted = false;
        for _ in 0..40 {
            let cand = step(w, delta);
            let (b2, s2) = moments(cand);
            if b2.norm() < b.norm() {
                (w, b, s) = (cand, b2, s2);
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if b.norm() < opts.tol {
        return Ok(DeValue { value: w, residual: b.norm(), iterations: opts.max_iter });
    }
    Err(QcError::SolverDivergence { iterations: opts.max_iter, residual: b.norm() })
}

fn mean_moments(it: impl Iterator<Item = Complex64>, n: usize) -> (Complex64, Complex64) {
    let (b, s) = it.fold((Complex64::default(), Complex64::default()), |(b, s), t| (b + t, s + t * t));
    (b / n as f64, s / n as f64)
}

/// Conformal barycenter of equally weighted points on the unit circle.
pub fn conformal_barycenter(points: &[Complex64], opts: &DeOptions) -> Result<DeValue, QcError> {
    let mean = points.iter().sum::<Complex64>() / points.len() as f64;
    let start = if mean.norm() < 1.0 - 1e-9 { mean } else { mean * ((1.0 - 1e-9) / mean.norm()) };
    solve(start, |w| mean_moments(points.iter().map(|&p| to_frame(p, w)), points.len()), |w, d| from_frame(d, w), opts)
}

/// Barycenter of weighted points `(s_j, w_j)` of `ℝ` in the upper
/// half-plane, in the frame `τ_W(s) = (s - W)/(s - W̄)`. Working in this
/// frame avoids the cancellation the disk model suffers for `W` near the
/// axis. Weights are normalized internally.
pub fn half_plane_barycenter(points: &[(f64, f64)], opts: &DeOptions) -> Result<DeValue, QcError> {
    let total: f64 = points.iter().map(|p| p.1).sum();
    let mean = points.iter().map(|&(s, w)| cayley(Complex64::new(s, 0.0)) * w).sum::<Complex64>() / total;
    let m = if mean.norm() < 1.0 - 1e-9 { mean } else { mean * ((1.0 - 1e-9) / mean.norm()) };
    let moments = |big_w: Complex64| {
        let (b, s) = points.iter().fold((Complex64::default(), Complex64::default()), |(b, s), &(x, w)| {
            let t = (Complex64::new(x, 0.0) - big_w) / (Complex64::new(x, 0.0) - big_w.conj());
            (b + t * w, s + t * t * w)
        });
        (b / total, s / total)
    };
    let step = |w: Complex64, d: Complex64| (w - d * w.conj()) / (Complex64::new(1.0, 0.0) - d);
    solve(cayley_inverse(m), moments, step, opts)
}

fn unit_nodes(n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |j| Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / n as f64))
}

/// `E(φ)(z)` for an orientation-preserving circle homeomorphism `φ` and
/// `|z| < 1`. Harmonic measure at `z` is sampled by pulling uniform nodes
/// back under `ζ ↦ (ζ - z)/(1 - z̄ζ)`.
pub fn douady_earle<F>(phi: &F, z: Complex64, opts: &DeOptions) -> Result<DeValue, QcError>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    opts.check()?;
    if !(z.norm() < 1.0) {
        return Err(QcError::BadPoint(format!("{z} is not in the unit disk")));
    }
    let points: Vec<Complex64> = unit_nodes(opts.nodes).map(|u| phi(from_frame(u, z))).collect();
    conformal_barycenter(&points, opts)
}

/// Cayley map `H → D`, `ζ ↦ (ζ - i)/(ζ + i)`.
pub fn cayley(z: Complex64) -> Complex64 {
    (z - Complex64::i()) / (z + Complex64::i())
}

pub fn cayley_inverse(w: Complex64) -> Complex64 {
    Complex64::i() * (Complex64::new(1.0, 0.0) + w) / (Complex64::new(1.0, 0.0) - w)
}

/// Tanh-sinh rule on `(0, 1)` as `(u, 1 - u, weight)`, both offsets computed
/// without cancellation.
fn tanh_sinh(m: usize) -> Vec<(f64, f64, f64)> {
    const V_MAX: f64 = 3.5;
    let h = 2.0 * V_MAX / (m - 1) as f64;
    let raw: Vec<(f64, f64, f64)> = (0..m)
        .map(|j| {
            let v = -V_MAX + j as f64 * h;
            let s = FRAC_PI_2 * v.sinh();
            let lo = 1.0 / (1.0 + (-2.0 * s).exp());
            let hi = 1.0 / (1.0 + (2.0 * s).exp());
            (lo, hi, FRAC_PI_2 * v.cosh() / (s.cosh() * s.cosh()))
        })
        .collect();
    let total: f64 = raw.iter().map(|r| r.2).sum();
    raw.into_iter().map(|(lo, hi, w)| (lo, hi, w / total)).collect()
}

/// Harmonic measure of `z ∈ H` on the real line as weighted nodes.
///
/// In the angle `φ` of `t ↦ (t - z)/(t - z̄)` the measure is uniform, and
/// the axis splits at `t = 0` (`φ = 2 arg z`) and `t = ∞` (`φ = 0`) into two
/// arcs of mass `arg z / π` and `1 - arg z / π`. Each arc gets a tanh-sinh
/// rule, which absorbs the algebraic singularities boundary maps have at
/// `0` and `∞`. Nodes depend on `arg z` only and scale with `|z|`, so the
/// discretization commutes with `z ↦ λz`.
pub fn half_plane_nodes(z: Complex64, n: usize) -> Vec<(f64, f64)> {
    let (r, theta) = (z.norm(), z.arg());
    let rule = tanh_sinh(n / 2);
    let mut out = Vec::with_capacity(2 * rule.len());
    for (sign, len) in [(-1.0, theta), (1.0, PI - theta)] {
        for &(lo, hi, w) in &rule {
            // offsets ψ from t = 0 and c from t = ∞ along the arc
            let (psi, c) = (len * lo, len * hi);
            out.push((sign * r * psi.sin() / c.sin(), w * len / PI));
        }
    }
    out
}

/// `E(Ψ)(z)` for an increasing homeomorphism `Ψ` of `ℝ` and `z ∈ H`.
pub fn douady_earle_half_plane<F>(psi: &F, z: Complex64, opts: &DeOptions) -> Result<DeValue, QcError>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    opts.check()?;
    if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
        return Err(QcError::BadPoint(format!("{z} is not in the upper half-plane")));
    }
    let points: Vec<(f64, f64)> = half_plane_nodes(z, opts.nodes).into_iter().map(|(t, w)| (psi(t), w)).collect();
    half_plane_barycenter(&points, opts)
}

/// Circle homeomorphism interpolated from samples of its lift: angles
/// `θ_i ∈ [0, 2π)` and increasing lifted values with total increase `< 2π`
/// over the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCircleMap {
    theta: Vec<f64>,
    lift: Vec<f64>,
}

impl SampledCircleMap {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self, QcError> {
        if samples.len() < 3 {
            return Err(QcError::Grid(format!("need at least 3 samples, got {}", samples.len())));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(QcError::Monotonicity { index: i + 1 });
            }
        }
        let (first, last) = (samples[0], samples[samples.len() - 1]);
        if !(first.0 >= 0.0 && last.0 < 2.0 * PI && last.1 < first.1 + 2.0 * PI) {
            return Err(QcError::Grid("samples must cover less than one turn".into()));
        }
        // close the loop with the periodic copy of the first sample
        let mut theta: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let mut lift: Vec<f64> = samples.iter().map(|s| s.1).collect();
        theta.push(first.0 + 2.0 * PI);
        lift.push(first.1 + 2.0 * PI);
        Ok(SampledCircleMap { theta, lift })
    }

    /// Piecewise linear in the lifted angle.
    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        let mut a = zeta.arg();
        let base = self.theta[0];
        while a < base {
            a += 2.0 * PI;
        }
        while a >= base + 2.0 * PI {
            a -= 2.0 * PI;
        }
        let i = self.theta.partition_point(|&t| t <= a).clamp(1, self.theta.len() - 1) - 1;
        let s = (a - self.theta[i]) / (self.theta[i + 1] - self.theta[i]);
        Complex64::from_polar(1.0, self.lift[i] + s * (self.lift[i + 1] - self.lift[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::Moebius;

    fn disk_automorphism(a: Complex64, rot: f64) -> Moebius {
        // ζ ↦ e^{i rot} (ζ - a)/(1 - ā ζ)
        let e = Complex64::from_polar(1.0, rot);
        Moebius::new(e, -e * a, -a.conj(), Complex64::new(1.0, 0.0)).unwrap()
    }

    fn ap(g: &Moebius, z: Complex64) -> Complex64 {
        g.apply_finite(z).as_finite().unwrap()
    }

    fn wobble(z: Complex64) -> Complex64 {
        let t = z.arg();
        Complex64::from_polar(1.0, t + 0.3 * t.sin() + 0.1 * (2.0 * t).cos())
    }

    #[test]
    fn identity_is_fixed() {
        let opts = DeOptions::default();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.3, -0.5), Complex64::new(-0.8, 0.1)] {
            let e = douady_earle(&|w| w, z, &opts).unwrap();
            assert!((e.value - z).norm() < 1e-12, "{z}: {}", e.value);
        }
    }

    #[test]
    fn moebius_maps_extend_to_themselves() {
        let g = disk_automorphism(Complex64::new(0.4, 0.2), 0.7);
        let opts = DeOptions::default();
        for z in [Complex64::new(0.1, 0.1), Complex64::new(-0.5, 0.6)] {
            let e = douady_earle(&|w| ap(&g, w), z, &opts).unwrap();
            assert!((e.value - ap(&g, z)).norm() < 1e-9);
        }
    }

    #[test]
    fn naturality_and_resolution_stability() {
        let g1 = disk_automorphism(Complex64::new(-0.3, 0.25), 1.1);
        let g2 = disk_automorphism(Complex64::new(0.2, -0.4), -0.4);
        let opts = DeOptions::default();
        let fine = DeOptions { nodes: 2048, ..opts };
        let conj = |w: Complex64| ap(&g1, wobble(ap(&g2, w)));
        for z in [Complex64::new(0.0, 0.2), Complex64::new(0.35, -0.1), Complex64::new(-0.2, -0.3)] {
            let lhs = ap(&g1, douady_earle(&wobble, ap(&g2, z), &opts).unwrap().value);
            let rhs = douady_earle(&conj, z, &opts).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-8, "{z}: {}", (lhs - rhs).norm());
            let coarse = douady_earle(&wobble, z, &opts).unwrap().value;
            let refined = douady_earle(&wobble, z, &fine).unwrap().value;
            assert!((coarse - refined).norm() < 10.0 * opts.tol);
        }
    }

    #[test]
    fn half_plane_identity_and_scaling() {
        let opts = DeOptions::default();
        let z = Complex64::new(0.7, 1.3);
        let e = douady_earle_half_plane(&|t| t, z, &opts).unwrap();
        assert!((e.value - z).norm() < 1e-10);
        let cube = |t: f64| t * t * t;
        let a = douady_earle_half_plane(&cube, z, &opts).unwrap().value;
        let b = douady_earle_half_plane(&cube, z * 2.0, &opts).unwrap().value;
        assert!((b - a * 8.0).norm() < 1e-8 * b.norm());
        assert!(a.im > 0.0);
    }

    #[test]
    fn input_checks() {
        let few = DeOptions { nodes: 100, ..Default::default() };
        assert!(matches!(douady_earle(&|w| w, Complex64::new(0.0, 0.0), &few), Err(QcError::TooFewNodes { .. })));
        assert!(douady_earle(&|w| w, Complex64::new(1.0, 0.0), &DeOptions::default()).is_err());
        assert!(douady_earle_half_plane(&|t| t, Complex64::new(1.0, -0.1), &DeOptions::default()).is_err());
        let capped = DeOptions { max_iter: 1, tol: 1e-15, ..Default::default() };
        assert!(matches!(douady_earle(&wobble, Complex64::new(0.5, 0.3), &capped), Err(QcError::SolverDivergence { .. })));
    }

    #[test]
    fn sampled_circle_map() {
        let samples: Vec<(f64, f64)> = (0..64)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 64.0;
                (t, t + 0.2 * t.sin())
            })
            .collect();
        let m = SampledCircleMap::new(&samples).unwrap();
        let w = m.eval(Complex64::from_polar(1.0, 1.0));
        assert!((w.arg() - (1.0 + 0.2 * 1.0f64.sin())).abs() < 1e-3);
        let e = douady_earle(&|z| m.eval(z), Complex64::new(0.2, 0.1), &DeOptions::default()).unwrap();
        assert!(e.value.norm() < 1.0);
        assert!(SampledCircleMap::new(&[(0.0, 0.0), (1.0, -1.0), (2.0, 3.0)]).is_err());
    }
}
