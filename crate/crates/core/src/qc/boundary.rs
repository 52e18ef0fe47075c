//! Increasing homeomorphisms `Ψ` of the real line with `Ψ(kx) = κΨ(x)`.
//!
//! `Ψ` is stored on the fundamental intervals `[1, k]` and `[-k, -1]` and
//! extended everywhere else by the equivariance rule, so that rule holds by
//! construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QcError;

const SEAM_TOL: f64 = 1e-12;

/// Piecewise cubic Hermite interpolant with Fritsch-Butland slopes; strictly
/// increasing for strictly increasing data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

fn harmonic_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    if d0 * d1 <= 0.0 {
        return 0.0;
    }
    let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
    (w1 + w2) / (w1 / d0 + w2 / d1)
}

impl MonotoneCubic {
    /// Interior slopes from the data; the two end slopes are supplied.
    pub fn with_end_slopes(x: Vec<f64>, y: Vec<f64>, first: f64, last: f64) -> Self {
        let n = x.len();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            d[i] = harmonic_slope(h0, h1, (y[i] - y[i - 1]) / h0, (y[i + 1] - y[i]) / h1);
        }
        d[0] = first;
        d[n - 1] = last;
        MonotoneCubic { x, y, d }
    }

    fn segment(&self, t: f64) -> (usize, f64, f64) {
        let n = self.x.len();
        let i = self.x.partition_point(|&xi| xi <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        (i, h, (t - self.x[i]) / h)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (i, h, s) = self.segment(t);
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (3.0 * s2 - 2.0 * s3) * y1 + (s3 - s2) * h * d1
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (i, h, s) = self.segment(t);
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let s2 = s * s;
        (6.0 * s2 - 6.0 * s) * (y0 - y1) / h + (3.0 * s2 - 4.0 * s + 1.0) * d0 + (3.0 * s2 - 2.0 * s) * d1
    }
}

/// `Ψ` on `[1, k]` (or `s ↦ -Ψ(-s)` on the same interval for the negative side).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fundamental {
    /// `s^α`.
    Power { alpha: f64 },
    Sampled(MonotoneCubic),
}

impl Fundamental {
    fn eval(&self, s: f64) -> f64 {
        match self {
            Fundamental::Power { alpha } => s.powf(*alpha),
            Fundamental::Sampled(c) => c.eval(s),
        }
    }

    fn derivative(&self, s: f64) -> f64 {
        match self {
            Fundamental::Power { alpha } => alpha * s.powf(alpha - 1.0),
            Fundamental::Sampled(c) => c.derivative(s),
        }
    }

    /// Normalized samples `(x_i, y_i)` on `[1, k]` with `y_0 = 1` and
    /// `y_last = κ`. End slopes are shared across the seam so the extension
    /// is C¹.
    fn sampled(k: f64, kappa: f64, pts: &[(f64, f64)]) -> Result<Self, QcError> {
        if pts.len() < 3 {
            return Err(QcError::Grid(format!("need at least 3 samples, got {}", pts.len())));
        }
        for (i, w) in pts.windows(2).enumerate() {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(QcError::Monotonicity { index: i + 1 });
            }
        }
        let (x0, xn) = (pts[0].0, pts[pts.len() - 1].0);
        if (x0 - 1.0).abs() > SEAM_TOL || (xn - k).abs() > SEAM_TOL * k {
            return Err(QcError::Grid(format!("samples must span [1, {k}], got [{x0}, {xn}]")));
        }
        let scale = pts[0].1;
        if scale <= 0.0 {
            return Err(QcError::Monotonicity { index: 0 });
        }
        let end = pts[pts.len() - 1].1 / scale;
        if (end - kappa).abs() > SEAM_TOL * kappa {
            return Err(QcError::Seam { expected: kappa, found: end });
        }
        let mut x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let mut y: Vec<f64> = pts.iter().map(|p| p.1 / scale).collect();
        let n = x.len();
        x[0] = 1.0;
        x[n - 1] = k;
        y[0] = 1.0;
        y[n - 1] = kappa;
        // slope at x = k from its left neighbour and the image k·x_1 of the
        // first interior node
        let (hl, hr) = (k - x[n - 2], k * (x[1] - 1.0));
        let last = harmonic_slope(hl, hr, (kappa - y[n - 2]) / hl, (kappa * y[1] - kappa) / hr);
        let first = last * k / kappa;
        Ok(Fundamental::Sampled(MonotoneCubic::with_end_slopes(x, y, first, last)))
    }
}

/// An increasing homeomorphism of `ℝ` with `Ψ(0) = 0`, `Ψ(±1) = ±1` and
/// `Ψ(kx) = κΨ(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryMap {
    k: f64,
    kappa: f64,
    positive: Fundamental,
    negative: Fundamental,
    #[serde(skip)]
    ln_k: f64,
}

fn check_multiplier(name: &'static str, v: f64) -> Result<(), QcError> {
    if v.is_finite() && v > 1.0 {
        Ok(())
    } else {
        Err(QcError::InvalidMultiplier { name, value: v })
    }
}

impl BoundaryMap {
    fn assemble(k: f64, kappa: f64, positive: Fundamental, negative: Fundamental) -> Self {
        BoundaryMap { k, kappa, positive, negative, ln_k: k.ln() }
    }

    pub fn identity(k: f64) -> Result<Self, QcError> {
        Self::power(k, 1.0)
    }

    /// `sign(x)|x|^α` with `κ = k^α`.
    pub fn power(k: f64, alpha: f64) -> Result<Self, QcError> {
        check_multiplier("k", k)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(QcError::InvalidMultiplier { name: "alpha", value: alpha });
        }
        let f = Fundamental::Power { alpha };
        Ok(Self::assemble(k, k.powf(alpha), f.clone(), f))
    }

    /// From samples on `[1, k]` and optionally `[-k, -1]` (both in increasing
    /// order of `x`); the negative side defaults to the odd reflection.
    /// Values are rescaled so that `Ψ(±1) = ±1`.
    pub fn from_samples(
        k: f64,
        kappa: f64,
        positive: &[(f64, f64)],
        negative: Option<&[(f64, f64)]>,
    ) -> Result<Self, QcError> {
        check_multiplier("k", k)?;
        check_multiplier("kappa", kappa)?;
        let pos = Fundamental::sampled(k, kappa, positive)?;
        let neg = match negative {
            None => pos.clone(),
            Some(pts) => {
                let mirrored: Vec<(f64, f64)> = pts.iter().rev().map(|&(x, y)| (-x, -y)).collect();
                Fundamental::sampled(k, kappa, &mirrored)?
            }
        };
        Ok(Self::assemble(k, kappa, pos, neg))
    }

    /// Samples `f` at `nodes` uniformly spaced points of each fundamental
    /// interval.
    pub fn from_fn(k: f64, kappa: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self, QcError> {
        check_multiplier("k", k)?;
        let xs = (0..nodes).map(|i| 1.0 + (k - 1.0) * i as f64 / (nodes - 1).max(1) as f64);
        let pos: Vec<(f64, f64)> = xs.clone().map(|x| (x, f(x))).collect();
        let neg: Vec<(f64, f64)> = xs.rev().map(|x| (-x, f(-x))).collect();
        Self::from_samples(k, kappa, &pos, Some(&neg))
    }

    /// Independent random increasing samples on both sides, reproducible
    /// from `seed`.
    pub fn random(k: f64, kappa: f64, nodes: usize, seed: u64) -> Result<Self, QcError> {
        check_multiplier("k", k)?;
        check_multiplier("kappa", kappa)?;
        if nodes < 3 {
            return Err(QcError::Grid(format!("need at least 3 samples, got {nodes}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut side = || -> Vec<(f64, f64)> {
            let steps: Vec<f64> = (1..nodes).map(|_| rng.gen_range(-1.0f64..1.0).exp()).collect();
            let total: f64 = steps.iter().sum();
            let mut acc = 0.0;
            let mut pts = vec![(1.0, 1.0)];
            for (i, s) in steps.iter().enumerate() {
                acc += s;
                let x = 1.0 + (k - 1.0) * (i + 1) as f64 / (nodes - 1) as f64;
                pts.push((x, 1.0 + (kappa - 1.0) * acc / total));
            }
            pts.last_mut().unwrap().1 = kappa;
            pts
        };
        let pos = side();
        let neg: Vec<(f64, f64)> = side().into_iter().rev().map(|(x, y)| (-x, -y)).collect();
        Self::from_samples(k, kappa, &pos, Some(&neg))
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_odd(&self) -> bool {
        self.positive == self.negative
    }

    /// `x = k^n y` with `y ∈ [1, k)`.
    fn reduce(&self, x: f64) -> (i32, f64) {
        let mut n = (x.ln() / self.ln_k).floor() as i32;
        let mut y = x / self.k.powi(n);
        if y < 1.0 {
            n -= 1;
            y *= self.k;
        } else if y >= self.k {
            n += 1;
            y /= self.k;
        }
        (n, y.clamp(1.0, self.k))
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let (n, y) = self.reduce(x.abs());
        if x > 0.0 {
            self.kappa.powi(n) * self.positive.eval(y)
        } else {
            -self.kappa.powi(n) * self.negative.eval(y)
        }
    }

    /// `Ψ'(x)` for `x ≠ 0`.
    pub fn derivative(&self, x: f64) -> f64 {
        let (n, y) = self.reduce(x.abs());
        let scale = (self.kappa / self.k).powi(n);
        if x > 0.0 {
            scale * self.positive.derivative(y)
        } else {
            scale * self.negative.derivative(y)
        }
    }
}

/// Serializable recipe for a [`BoundaryMap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryMapSpec {
    Identity { k: f64 },
    Power { k: f64, alpha: f64 },
    Samples { k: f64, kappa: f64, positive: Vec<(f64, f64)>, negative: Option<Vec<(f64, f64)>> },
    Random { k: f64, kappa: f64, nodes: usize, seed: u64 },
}

pub fn build_boundary_map(spec: &BoundaryMapSpec) -> Result<BoundaryMap, QcError> {
    match spec {
        BoundaryMapSpec::Identity { k } => BoundaryMap::identity(*k),
        BoundaryMapSpec::Power { k, alpha } => BoundaryMap::power(*k, *alpha),
        BoundaryMapSpec::Samples { k, kappa, positive, negative } => {
            BoundaryMap::from_samples(*k, *kappa, positive, negative.as_deref())
        }
        BoundaryMapSpec::Random { k, kappa, nodes, seed } => BoundaryMap::random(*k, *kappa, *nodes, *seed),
    }
}

/// `ρ(x, t) = (Ψ(x) - Ψ(x - t)) / (Ψ(x + t) - Ψ(x))`; NaN unless `t > 0`.
pub fn qs_ratio(psi: &BoundaryMap, x: f64, t: f64) -> f64 {
    if !(t > 0.0) {
        return f64::NAN;
    }
    let v = psi.eval(x);
    (v - psi.eval(x - t)) / (psi.eval(x + t) - v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QsGrid {
    /// Nodes on each of `[1, k]` and `[-k, -1]`.
    pub x_nodes: usize,
    /// Log-spaced nodes on `[k^{-e}, k^{e}]`.
    pub t_nodes: usize,
    pub t_exponent: u32,
}

impl Default for QsGrid {
    fn default() -> Self {
        QsGrid { x_nodes: 512, t_nodes: 2048, t_exponent: 6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub x: f64,
    pub t: f64,
}

impl Extremum {
    fn better(self, o: Extremum, max: bool) -> Extremum {
        let ord = self.value.partial_cmp(&o.value).unwrap_or(std::cmp::Ordering::Equal);
        let ord = if max { ord.reverse() } else { ord };
        match ord.then((self.x, self.t).partial_cmp(&(o.x, o.t)).unwrap_or(std::cmp::Ordering::Equal)) {
            std::cmp::Ordering::Greater => o,
            _ => self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Acc {
    min: Extremum,
    max: Extremum,
    samples: usize,
}

impl Acc {
    const EMPTY: Acc = Acc {
        min: Extremum { value: f64::INFINITY, x: f64::INFINITY, t: f64::INFINITY },
        max: Extremum { value: f64::NEG_INFINITY, x: f64::INFINITY, t: f64::INFINITY },
        samples: 0,
    };

    fn push(&mut self, e: Extremum) {
        self.min = self.min.better(e, false);
        self.max = self.max.better(e, true);
        self.samples += 1;
    }

    fn merge(self, o: Acc) -> Acc {
        Acc { min: self.min.better(o.min, false), max: self.max.better(o.max, true), samples: self.samples + o.samples }
    }
}

/// Sampled extrema of `ρ` over one region, with the a-priori bounds the
/// region admits when they are computable from `Ψ` alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub region: String,
    pub samples: usize,
    pub min: Extremum,
    pub max: Extremum,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
}

impl CaseReport {
    fn new(case: &str, region: &str, acc: Acc, lower: Option<f64>, upper: Option<f64>) -> Self {
        CaseReport {
            case: case.into(),
            region: region.into(),
            samples: acc.samples,
            min: acc.min,
            max: acc.max,
            lower_bound: lower,
            upper_bound: upper,
        }
    }
}

/// Estimated quasi-symmetry constants. A finite scan only sees part of the
/// supremum, so `big_m_hat ≤ M` and `m_hat ≥ m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QsReport {
    pub k: f64,
    pub kappa: f64,
    pub big_m_hat: f64,
    pub m_hat: f64,
    pub cases: Vec<CaseReport>,
    /// Largest distance of a sampled `ρ(0, t)` outside `[1/κ, κ]` (≤ 0 when inside).
    pub case_iv_excess: f64,
    pub case_iv_holds: bool,
    pub t_range: (f64, f64),
    pub grid: QsGrid,
    pub estimates_are_one_sided: bool,
}

impl QsReport {
    pub fn case(&self, name: &str) -> Option<&CaseReport> {
        self.cases.iter().find(|c| c.case == name)
    }
}

/// Scan `ρ` over `x ∈ {0} ∪ [1, k] ∪ [-k, -1]` and a log-spaced `t` grid.
/// By `ρ(kx, kt) = ρ(x, t)` this covers every `x ≠ 0` up to the `t` range.
pub fn qs_constants(psi: &BoundaryMap, grid: &QsGrid) -> Result<QsReport, QcError> {
    if grid.x_nodes < 64 || grid.t_nodes < 64 || grid.t_exponent == 0 {
        return Err(QcError::Grid(format!(
            "need at least 64 nodes per dimension and a positive t exponent, got {grid:?}"
        )));
    }
    let (k, kappa) = (psi.k, psi.kappa);
    let e = grid.t_exponent as f64;
    let ts: Vec<f64> = (0..grid.t_nodes)
        .map(|j| k.powf(-e + 2.0 * e * j as f64 / (grid.t_nodes - 1) as f64))
        .collect();
    let xs: Vec<f64> = (0..grid.x_nodes).map(|i| 1.0 + (k - 1.0) * i as f64 / (grid.x_nodes - 1) as f64).collect();

    // [case i, case ii, case iii, negative side]
    let accs = xs
        .par_iter()
        .map(|&x| {
            let mut a = [Acc::EMPTY; 4];
            for &t in &ts {
                let r = Extremum { value: qs_ratio(psi, x, t), x, t };
                if t <= 0.5 {
                    a[0].push(r);
                } else {
                    a[2].push(r);
                    if t < x {
                        a[1].push(r);
                    }
                }
                a[3].push(Extremum { value: qs_ratio(psi, -x, t), x: -x, t });
            }
            a
        })
        .reduce(|| [Acc::EMPTY; 4], |a, b| [a[0].merge(b[0]), a[1].merge(b[1]), a[2].merge(b[2]), a[3].merge(b[3])]);
    let mut at_zero = Acc::EMPTY;
    for &t in &ts {
        at_zero.push(Extremum { value: qs_ratio(psi, 0.0, t), x: 0.0, t });
    }

    // case (i): ratio of derivatives on [1/2, k + 1/2]
    let dn = 4 * grid.x_nodes;
    let derivs: Vec<f64> = (0..dn).map(|i| psi.derivative(0.5 + k * i as f64 / (dn - 1) as f64)).collect();
    let (dmin, dmax) = derivs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    // case (ii): κ / inf(Ψ(x+1/2) - Ψ(x)) and inf(Ψ(x) - Ψ(x-1/2)) / (κΨ(2))
    let fwd = xs.iter().map(|&x| psi.eval(x + 0.5) - psi.eval(x)).fold(f64::INFINITY, f64::min);
    let back = xs.iter().map(|&x| psi.eval(x) - psi.eval(x - 0.5)).fold(f64::INFINITY, f64::min);

    let excess = (1.0 / kappa - at_zero.min.value).max(at_zero.max.value - kappa);
    let all = accs.iter().fold(at_zero, |a, b| a.merge(*b));
    let cases = vec![
        CaseReport::new("i", "x in [1,k], t <= 1/2", accs[0], Some(dmin / dmax), Some(dmax / dmin)),
        CaseReport::new("ii", "x in [1,k], 1/2 < t < x", accs[1], Some(back / (kappa * psi.eval(2.0))), Some(kappa / fwd)),
        CaseReport::new("iii", "x in [1,k], t > 1/2", accs[2], None, None),
        CaseReport::new("iv", "x = 0", at_zero, Some(1.0 / kappa), Some(kappa)),
        CaseReport::new("negative", "x in [-k,-1]", accs[3], None, None),
    ];
    Ok(QsReport {
        k,
        kappa,
        big_m_hat: all.max.value,
        m_hat: all.min.value,
        cases,
        case_iv_excess: excess,
        case_iv_holds: excess <= 1e-9,
        t_range: (ts[0], ts[ts.len() - 1]),
        grid: *grid,
        estimates_are_one_sided: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_map_equivariance_and_normalization() {
        for alpha in [0.5, 1.0, 2.0, 3.3] {
            let psi = BoundaryMap::power(2.5, alpha).unwrap();
            assert_eq!(psi.eval(0.0), 0.0);
            assert_eq!(psi.eval(1.0), 1.0);
            assert_eq!(psi.eval(-1.0), -1.0);
            for x in [-40.0, -3.1, -0.02, 0.3, 1.7, 9.0, 1234.5] {
                let lhs = psi.eval(2.5 * x);
                assert!((lhs - psi.kappa() * psi.eval(x)).abs() <= 1e-12 * lhs.abs(), "{alpha} {x}");
                let exact = x.signum() * x.abs().powf(alpha);
                assert!((psi.eval(x) - exact).abs() <= 1e-12 * exact.abs());
            }
        }
    }

    #[test]
    fn ratio_examples() {
        let sq = BoundaryMap::power(2.0, 2.0).unwrap();
        assert!((qs_ratio(&sq, 1.0, 0.5) - 0.6).abs() < 1e-15);
        for t in [0.01, 0.5, 3.0, 70.0] {
            assert!((qs_ratio(&sq, 0.0, t) - 1.0).abs() < 1e-14);
        }
        let id = BoundaryMap::identity(3.0).unwrap();
        assert!((qs_ratio(&id, 1.3, 0.7) - 1.0).abs() < 1e-14);
        assert!(qs_ratio(&id, 1.0, 0.0).is_nan());
    }

    #[test]
    fn sampled_map_is_monotone_and_c1_across_the_seam() {
        let psi = BoundaryMap::random(2.0, 3.0, 17, 7).unwrap();
        let mut prev = psi.eval(-20.0);
        for i in 1..4000 {
            let v = psi.eval(-20.0 + i as f64 * 0.01);
            assert!(v > prev, "at step {i}");
            prev = v;
        }
        for seam in [2.0, -2.0, 4.0, 1.0] {
            let (l, r) = (psi.derivative(seam * (1.0 - 1e-9)), psi.derivative(seam * (1.0 + 1e-9)));
            assert!((l - r).abs() < 1e-6 * l.abs(), "{seam}: {l} vs {r}");
        }
        assert_eq!(psi.eval(2.0), 3.0);
        assert!(!psi.is_odd());
    }

    #[test]
    fn sample_errors() {
        let dec = [(1.0, 1.0), (1.5, 0.5), (2.0, 4.0)];
        assert!(matches!(BoundaryMap::from_samples(2.0, 4.0, &dec, None), Err(QcError::Monotonicity { index: 1 })));
        let seam = [(1.0, 1.0), (1.5, 2.0), (2.0, 3.9)];
        assert!(matches!(BoundaryMap::from_samples(2.0, 4.0, &seam, None), Err(QcError::Seam { .. })));
        // rescaled so that Ψ(1) = 1
        let scaled = [(1.0, 2.0), (1.5, 4.0), (2.0, 8.0)];
        let psi = BoundaryMap::from_samples(2.0, 4.0, &scaled, None).unwrap();
        assert_eq!(psi.eval(1.5), 2.0);
        assert!(BoundaryMap::power(1.0, 2.0).is_err());
        assert!(BoundaryMap::power(2.0, -1.0).is_err());
    }

    #[test]
    fn sampled_square_approximates_formula() {
        let psi = BoundaryMap::from_fn(2.0, 4.0, 257, |x| x * x.abs()).unwrap();
        for x in [1.1, 1.77, -1.3, 5.5] {
            assert!((psi.eval(x) - x * x.abs()).abs() < 1e-6 * x * x);
        }
    }

    #[test]
    fn identity_constants() {
        let g = QsGrid { x_nodes: 64, t_nodes: 128, t_exponent: 6 };
        let rep = qs_constants(&BoundaryMap::identity(2.0).unwrap(), &g).unwrap();
        assert!((rep.big_m_hat - 1.0).abs() < 1e-9 && (rep.m_hat - 1.0).abs() < 1e-9);
        assert!(qs_constants(&BoundaryMap::identity(2.0).unwrap(), &QsGrid { x_nodes: 10, ..g }).is_err());
    }

    #[test]
    fn square_constants() {
        let g = QsGrid { x_nodes: 64, t_nodes: 256, t_exponent: 6 };
        let rep = qs_constants(&BoundaryMap::power(2.0, 2.0).unwrap(), &g).unwrap();
        let iv = rep.case("iv").unwrap();
        assert!((iv.min.value - 1.0).abs() < 1e-12 && (iv.max.value - 1.0).abs() < 1e-12);
        assert!(rep.case_iv_holds);
        assert!(rep.m_hat <= 1.0 && 1.0 <= rep.big_m_hat && rep.big_m_hat.is_finite());
        let i = rep.case("i").unwrap();
        assert!(i.lower_bound.unwrap() <= i.min.value && i.max.value <= i.upper_bound.unwrap());
        let ii = rep.case("ii").unwrap();
        assert!(ii.lower_bound.unwrap() <= ii.min.value && ii.max.value <= ii.upper_bound.unwrap());
    }

    #[test]
    fn scan_is_deterministic() {
        let psi = BoundaryMap::random(3.0, 2.0, 9, 1).unwrap();
        let g = QsGrid { x_nodes: 64, t_nodes: 64, t_exponent: 4 };
        assert_eq!(qs_constants(&psi, &g).unwrap(), qs_constants(&psi, &g).unwrap());
    }
}
