//! Exact Möbius arithmetic over the Gaussian rationals `Q(i)`.
//!
//! Matrices are not normalized (a square root of the determinant is usually
//! irrational); classification works with the projective invariant
//! `tr² / det` instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{MapKind, Moebius, MoebiusError};

/// `re + im·i` with rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        GaussianRational { re: BigRational::from_integer(BigInt::from(re)), im: BigRational::from_integer(BigInt::from(im)) }
    }

    pub fn zero() -> Self {
        Self::from_integers(0, 0)
    }

    pub fn one() -> Self {
        Self::from_integers(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Division; `None` for a zero divisor.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let n = other.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let p = self * &other.conj();
        Some(GaussianRational { re: p.re / &n, im: p.im / n })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})i", self.re, self.im)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

/// A Möbius transformation with Gaussian-rational entries, determinant nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMoebius {
    a: GaussianRational,
    b: GaussianRational,
    c: GaussianRational,
    d: GaussianRational,
}

impl ExactMoebius {
    pub fn new(a: GaussianRational, b: GaussianRational, c: GaussianRational, d: GaussianRational) -> Result<Self, MoebiusError> {
        let m = ExactMoebius { a, b, c, d };
        if m.det().is_zero() {
            return Err(MoebiusError::DegenerateMatrix { det: 0.0 });
        }
        Ok(m)
    }

    /// Integer matrix `[[a, b], [c, d]]`.
    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Result<Self, MoebiusError> {
        Self::new(
            GaussianRational::from_integers(a, 0),
            GaussianRational::from_integers(b, 0),
            GaussianRational::from_integers(c, 0),
            GaussianRational::from_integers(d, 0),
        )
    }

    pub fn identity() -> Self {
        ExactMoebius { a: GaussianRational::one(), b: GaussianRational::zero(), c: GaussianRational::zero(), d: GaussianRational::one() }
    }

    pub fn entries(&self) -> [&GaussianRational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> GaussianRational {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn trace(&self) -> GaussianRational {
        &self.a + &self.d
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &ExactMoebius) -> ExactMoebius {
        ExactMoebius {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    /// Adjugate; projectively the inverse.
    pub fn inverse(&self) -> ExactMoebius {
        ExactMoebius { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// `tr² / det`, invariant under scaling of the matrix.
    pub fn normalized_trace_squared(&self) -> GaussianRational {
        let t = self.trace();
        (&t * &t).checked_div(&self.det()).expect("determinant is nonzero")
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Exact conjugacy type.
    pub fn classify(&self) -> MapKind {
        if self.is_identity() {
            return MapKind::Identity;
        }
        let t = self.normalized_trace_squared();
        let four = BigRational::from_integer(BigInt::from(4));
        if t.is_real() && t.re == four {
            MapKind::Parabolic
        } else if t.is_real() && t.re >= BigRational::zero() && t.re < four {
            MapKind::Elliptic
        } else {
            MapKind::Loxodromic
        }
    }

    pub fn to_float(&self) -> Result<Moebius, MoebiusError> {
        Moebius::new(self.a.to_complex(), self.b.to_complex(), self.c.to_complex(), self.d.to_complex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_parabolic_is_exact() {
        let t = ExactMoebius::from_integers(1, 1, 0, 1).unwrap();
        assert_eq!(t.classify(), MapKind::Parabolic);
        // conjugating keeps tr²/det = 4 exactly
        let g = ExactMoebius::from_integers(2, 1, 1, 1).unwrap();
        let c = g.compose(&t).compose(&g.inverse());
        assert_eq!(c.classify(), MapKind::Parabolic);
        assert_eq!(t.compose(&t.inverse()).classify(), MapKind::Identity);
    }

    #[test]
    fn integer_hyperbolic_words() {
        let a = ExactMoebius::from_integers(2, 1, 1, 1).unwrap();
        let b = ExactMoebius::from_integers(1, 1, 1, 2).unwrap();
        let w = a.compose(&b).compose(&a.inverse());
        assert_eq!(w.classify(), MapKind::Loxodromic);
        let f = w.to_float().unwrap();
        let fa = a.to_float().unwrap();
        let fb = b.to_float().unwrap();
        assert!(f.approx_eq(&fa.compose(&fb).compose(&fa.inverse()), 1e-12));
    }

    #[test]
    fn singular_rejected() {
        assert!(ExactMoebius::from_integers(1, 2, 2, 4).is_err());
    }

    #[test]
    fn gaussian_rotation_is_elliptic() {
        // z ↦ i z : tr² / det = (1+i)² / i = 2
        let m = ExactMoebius::new(
            GaussianRational::from_integers(0, 1),
            GaussianRational::zero(),
            GaussianRational::zero(),
            GaussianRational::one(),
        )
        .unwrap();
        assert_eq!(m.classify(), MapKind::Elliptic);
    }
}
