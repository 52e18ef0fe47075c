use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Moebius, MoebiusError, SpherePoint};

/// Geometric carrier of a [`Circle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleShape {
    Round { center: Complex64, radius: f64 },
    /// A line through `point` with unit `direction`.
    Line { point: Complex64, direction: Complex64 },
}

/// An oriented circle of the sphere: a round circle or a line together with a
/// choice of one of its two complementary disks.
///
/// For a round circle `inside = true` selects `|z - c| < r`, otherwise the
/// exterior (which contains `∞`). For a line `inside = true` selects the
/// half-plane on the left of `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircleRepr", into = "CircleRepr")]
pub struct Circle {
    shape: CircleShape,
    inside: bool,
}

impl Circle {
    /// The bounded disk `|z - center| < radius`.
    pub fn disk(center: Complex64, radius: f64) -> Result<Self, MoebiusError> {
        Self::round(center, radius, true)
    }

    pub fn round(center: Complex64, radius: f64, inside: bool) -> Result<Self, MoebiusError> {
        SpherePoint::finite(center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(MoebiusError::InvalidCircle(format!("radius {radius} must be positive and finite")));
        }
        Ok(Circle { shape: CircleShape::Round { center, radius }, inside })
    }

    pub fn line(point: Complex64, direction: Complex64, inside: bool) -> Result<Self, MoebiusError> {
        SpherePoint::finite(point)?;
        SpherePoint::finite(direction)?;
        let n = direction.norm();
        if n == 0.0 {
            return Err(MoebiusError::InvalidCircle("line direction must be non-zero".into()));
        }
        Ok(Circle { shape: CircleShape::Line { point, direction: direction / n }, inside })
    }

    pub fn shape(&self) -> CircleShape {
        self.shape
    }

    pub fn inside(&self) -> bool {
        self.inside
    }

    pub fn center(&self) -> Option<Complex64> {
        match self.shape {
            CircleShape::Round { center, .. } => Some(center),
            CircleShape::Line { .. } => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self.shape {
            CircleShape::Round { radius, .. } => Some(radius),
            CircleShape::Line { .. } => None,
        }
    }

    /// Same curve, other disk.
    pub fn complement(&self) -> Circle {
        Circle { shape: self.shape, inside: !self.inside }
    }

    /// Whether the oriented disk is a bounded round disk.
    pub fn is_bounded_disk(&self) -> bool {
        matches!(self.shape, CircleShape::Round { .. }) && self.inside
    }

    /// Signed depth of `z` in the oriented disk: positive inside, zero on the curve.
    pub fn signed_depth(&self, z: Complex64) -> f64 {
        match self.shape {
            CircleShape::Round { center, radius } => {
                let d = (z - center).norm();
                if self.inside { radius - d } else { d - radius }
            }
            CircleShape::Line { point, direction } => {
                let s = (direction.conj() * (z - point)).im;
                if self.inside { s } else { -s }
            }
        }
    }

    /// Open-disk membership.
    pub fn contains(&self, p: SpherePoint) -> bool {
        match p {
            SpherePoint::Finite(z) => self.signed_depth(z) > 0.0,
            SpherePoint::Infinity => matches!(self.shape, CircleShape::Round { .. }) && !self.inside,
        }
    }

    /// Distance of a finite point to the curve (not the disk).
    pub fn distance_to_curve(&self, z: Complex64) -> f64 {
        self.signed_depth(z).abs()
    }

    /// Three points on the curve, ordered so that the oriented disk lies on the left.
    pub fn sample_points(&self) -> [SpherePoint; 3] {
        match self.shape {
            CircleShape::Round { center, radius } => {
                let mut angles = [0.0, 2.0 * std::f64::consts::PI / 3.0, 4.0 * std::f64::consts::PI / 3.0];
                if !self.inside {
                    angles.reverse();
                }
                angles.map(|t| SpherePoint::Finite(center + Complex64::from_polar(radius, t)))
            }
            CircleShape::Line { point, direction } => {
                let dir = if self.inside { direction } else { -direction };
                [SpherePoint::Finite(point), SpherePoint::Finite(point + dir), SpherePoint::Infinity]
            }
        }
    }

    /// The oriented circle through three distinct points, with its disk on the
    /// left of the traversal `p1 → p2 → p3`.
    pub fn through_points(p1: SpherePoint, p2: SpherePoint, p3: SpherePoint) -> Result<Circle, MoebiusError> {
        // Cyclic rotation keeps the orientation; move ∞ to the last slot.
        let (q1, q2, q3) = match (p1, p2, p3) {
            (SpherePoint::Infinity, _, _) => (p2, p3, p1),
            (_, SpherePoint::Infinity, _) => (p3, p1, p2),
            _ => (p1, p2, p3),
        };
        let degenerate = || MoebiusError::InvalidCircle("three distinct points are required".into());
        let (z1, z2) = match (q1, q2) {
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => (a, b),
            _ => return Err(degenerate()),
        };
        if z1 == z2 {
            return Err(degenerate());
        }
        let z3 = match q3 {
            SpherePoint::Infinity => return Circle::line(z1, z2 - z1, true),
            SpherePoint::Finite(z) => z,
        };
        if z3 == z1 || z3 == z2 {
            return Err(degenerate());
        }
        let u = z2 - z1;
        let v = z3 - z1;
        let cross = (u.conj() * v).im;
        let scale = u.norm_sqr().max(v.norm_sqr());
        if cross.abs() <= 1e-15 * scale {
            // Collinear: a line, traversed in the direction compatible with the cyclic order.
            let dir = u / u.norm();
            let t2 = u.norm();
            let t3 = (dir.conj() * v).re;
            let forward = t3 > t2 || t3 < 0.0;
            return Circle::line(z1, if forward { dir } else { -dir }, true);
        }
        // Circumcenter in coordinates relative to z1.
        let d = 2.0 * cross;
        let un = u.norm_sqr();
        let vn = v.norm_sqr();
        let ox = (v.im * un - u.im * vn) / d;
        let oy = (u.re * vn - v.re * un) / d;
        let rel = Complex64::new(ox, oy);
        Circle::round(z1 + rel, rel.norm(), cross > 0.0)
    }

    /// Separation of the two closed oriented disks: positive when disjoint,
    /// zero when tangent, negative when they overlap. Pairs whose closures both
    /// contain `∞` return `-∞`.
    pub fn separation(&self, other: &Circle) -> f64 {
        use CircleShape::*;
        match (self.shape, other.shape) {
            (Round { center: c1, radius: r1 }, Round { center: c2, radius: r2 }) => {
                let d = (c1 - c2).norm();
                match (self.inside, other.inside) {
                    (true, true) => d - r1 - r2,
                    (true, false) => r2 - d - r1,
                    (false, true) => r1 - d - r2,
                    (false, false) => f64::NEG_INFINITY,
                }
            }
            (Round { center, radius }, Line { .. }) if self.inside => -other.signed_depth(center) - radius,
            (Line { .. }, Round { center, radius }) if other.inside => -self.signed_depth(center) - radius,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Point of contact of two tangent closed disks (meaningful when
    /// `separation` is ~0).
    pub fn contact_point(&self, other: &Circle) -> Option<Complex64> {
        use CircleShape::*;
        match (self.shape, other.shape) {
            (Round { center: c1, radius: r1 }, Round { center: c2, radius: r2 }) => {
                let d = c2 - c1;
                if d.norm() == 0.0 {
                    return None;
                }
                let u = d / d.norm();
                match (self.inside, other.inside) {
                    (true, true) => Some(c1 + u * r1),
                    // internally tangent: contact on the far side from the big centre
                    (true, false) => Some(c2 - u * r2),
                    (false, true) => Some(c1 + u * r1),
                    (false, false) => None,
                }
            }
            (Round { center, .. }, Line { point, direction }) | (Line { point, direction }, Round { center, .. }) => {
                let t = (direction.conj() * (center - point)).re;
                Some(point + direction * t)
            }
            _ => None,
        }
    }

    /// How far `inner`'s closed disk sits inside `self`'s: positive when it is
    /// strictly contained, negative when it sticks out, `-∞` when containment
    /// is impossible for the shape combination.
    pub fn containment_margin(&self, inner: &Circle) -> f64 {
        use CircleShape::*;
        match (self.shape, inner.shape) {
            (Round { center: co, radius: ro }, Round { center: ci, radius: ri }) => {
                let d = (co - ci).norm();
                match (self.inside, inner.inside) {
                    (true, true) => ro - d - ri,
                    (false, true) => d - ri - ro,
                    (false, false) => ri - d - ro,
                    (true, false) => f64::NEG_INFINITY,
                }
            }
            (Line { .. }, Round { center, radius }) if inner.inside => self.signed_depth(center) - radius,
            (Round { center, radius }, Line { .. }) if !self.inside => -inner.signed_depth(center) - radius,
            (Line { direction: d1, .. }, Line { point: p2, direction: d2 }) => {
                let o1 = if self.inside { d1 } else { -d1 };
                let o2 = if inner.inside { d2 } else { -d2 };
                if (o1 - o2).norm() < 1e-12 {
                    self.signed_depth(p2)
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => f64::NEG_INFINITY,
        }
    }

    /// Same curve and orientation up to `tol` (relative for large data).
    pub fn approx_eq(&self, other: &Circle, tol: f64) -> bool {
        if self.inside != other.inside {
            return false;
        }
        match (self.shape, other.shape) {
            (CircleShape::Round { center: c1, radius: r1 }, CircleShape::Round { center: c2, radius: r2 }) => {
                let s = 1.0 + c1.norm().max(r1);
                (c1 - c2).norm() <= tol * s && (r1 - r2).abs() <= tol * s
            }
            (CircleShape::Line { point: p1, direction: d1 }, CircleShape::Line { point: p2, direction: d2 }) => {
                let offset = (d1.conj() * (p2 - p1)).im.abs();
                (d1 - d2).norm() <= tol && offset <= tol * (1.0 + p1.norm())
            }
            _ => false,
        }
    }
}

/// Image of an oriented circle under a Möbius map. The orientation is carried
/// along, so the image of the oriented disk is the oriented disk of the result.
pub fn map_circle(f: &Moebius, circle: &Circle) -> Circle {
    let (a, b, c, d) = (f.a(), f.b(), f.c(), f.d());
    let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let CircleShape::Round { center, radius } = circle.shape {
        if c.norm() <= 1e-15 * scale {
            let m = a / d;
            let center = m * center + b / d;
            return Circle::round(center, m.norm() * radius, circle.inside).expect("affine image of a circle");
        }
        // f(z) = a/c - 1 / (c (cz + d)); u = cz + d sends the circle to |u - C| = R.
        let big_c = c * center + d;
        let big_r = c.norm() * radius;
        let dist = big_c.norm();
        if (dist - big_r).abs() > 1e-13 * big_r {
            let denom = dist * dist - big_r * big_r;
            let inv_center = big_c.conj() / denom;
            let inv_radius = big_r / denom.abs();
            let inside = circle.inside ^ (dist < big_r);
            let center = a / c - inv_center / c;
            return Circle::round(center, inv_radius / c.norm(), inside).expect("image radius is positive");
        }
        // The pole lies on the circle: the image is a line.
        let pole = -d / c;
        let t0 = (pole - center).arg();
        let sign = if circle.inside { 1.0 } else { -1.0 };
        let pts = [0.0, 1.0, 2.0]
            .map(|k| SpherePoint::Finite(center + Complex64::from_polar(radius, t0 + sign * k * 2.0 * std::f64::consts::PI / 3.0)));
        let [_, p2, p3] = pts;
        return Circle::through_points(SpherePoint::Infinity, f.apply(p2), f.apply(p3)).expect("three distinct image points");
    }
    let ([p1, p2, p3], from_pole) = line_samples(f, circle);
    let q1 = if from_pole { SpherePoint::Infinity } else { f.apply(p1) };
    Circle::through_points(q1, f.apply(p2), f.apply(p3)).expect("Möbius maps are injective")
}

/// Samples on a line, starting at the pole when the pole lies on it so that
/// the image line is recovered exactly.
fn line_samples(f: &Moebius, circle: &Circle) -> ([SpherePoint; 3], bool) {
    let CircleShape::Line { point, direction } = circle.shape else { unreachable!() };
    let dir = if circle.inside { direction } else { -direction };
    let (start, from_pole) = match f.pole() {
        SpherePoint::Finite(p) if circle.distance_to_curve(p) <= 1e-13 * (1.0 + p.norm()) => (p, true),
        _ => (point, false),
    };
    ([SpherePoint::Finite(start), SpherePoint::Finite(start + dir), SpherePoint::Infinity], from_pole)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CircleRepr {
    Round {
        center: [f64; 2],
        radius: f64,
        inside: bool,
    },
    Line {
        line: LineRepr,
        inside: bool,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRepr {
    point: [f64; 2],
    direction: [f64; 2],
}

impl TryFrom<CircleRepr> for Circle {
    type Error = MoebiusError;
    fn try_from(r: CircleRepr) -> Result<Self, Self::Error> {
        match r {
            CircleRepr::Round { center, radius, inside } => Circle::round(Complex64::new(center[0], center[1]), radius, inside),
            CircleRepr::Line { line, inside } => Circle::line(
                Complex64::new(line.point[0], line.point[1]),
                Complex64::new(line.direction[0], line.direction[1]),
                inside,
            ),
        }
    }
}

impl From<Circle> for CircleRepr {
    fn from(c: Circle) -> Self {
        match c.shape {
            CircleShape::Round { center, radius } => CircleRepr::Round { center: [center.re, center.im], radius, inside: c.inside },
            CircleShape::Line { point, direction } => CircleRepr::Line {
                line: LineRepr { point: [point.re, point.im], direction: [direction.re, direction.im] },
                inside: c.inside,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Oracle: the image circle passes through the images of three samples and
    /// the image of an interior point lands inside.
    fn check_image(f: &Moebius, circle: &Circle, image: &Circle) {
        for p in circle.sample_points() {
            match f.apply(p) {
                SpherePoint::Finite(w) => assert!(image.distance_to_curve(w) < 1e-10 * (1.0 + w.norm()), "{w} off image"),
                SpherePoint::Infinity => assert!(matches!(image.shape(), CircleShape::Line { .. })),
            }
        }
    }

    #[test]
    fn identity_preserves_circle() {
        let k = Circle::disk(c(0.3, -1.0), 0.7).unwrap();
        assert!(map_circle(&Moebius::identity(), &k).approx_eq(&k, 1e-15));
    }

    #[test]
    fn reciprocal_flips_unit_circle() {
        let k = Circle::disk(c(0.0, 0.0), 1.0).unwrap();
        let img = map_circle(&Moebius::reciprocal(), &k);
        assert!(img.approx_eq(&k.complement(), 1e-14));
    }

    #[test]
    fn doubling_moves_circle() {
        let f = Moebius::scaling(c(2.0, 0.0)).unwrap();
        let k = Circle::disk(c(3.0, 0.0), 1.0).unwrap();
        let img = map_circle(&f, &k);
        // 3-point oracle: 2, 4, 3+i map to 4, 8, 6+2i: centre 6, radius 2.
        let expected = Circle::through_points(
            SpherePoint::Finite(c(4.0, 0.0)),
            SpherePoint::Finite(c(6.0, 2.0)),
            SpherePoint::Finite(c(8.0, 0.0)),
        )
        .unwrap();
        assert!(img.approx_eq(&Circle::disk(c(6.0, 0.0), 2.0).unwrap(), 1e-14));
        assert_eq!(expected.center().map(|z| (z - c(6.0, 0.0)).norm() < 1e-14), Some(true));
    }

    #[test]
    fn circle_through_pole_becomes_line() {
        // 1/z sends |z - 1| = 1 (through 0) to the line Re w = 1/2.
        let k = Circle::disk(c(1.0, 0.0), 1.0).unwrap();
        let img = map_circle(&Moebius::reciprocal(), &k);
        match img.shape() {
            CircleShape::Line { point, direction } => {
                assert!((point.re - 0.5).abs() < 1e-12);
                assert!(direction.re.abs() < 1e-12);
            }
            CircleShape::Round { .. } => panic!("expected a line"),
        }
        // z = 1 is inside the original disk and maps to 1, which is in the image region.
        assert!(img.contains(SpherePoint::Finite(c(1.0, 0.0))));
        check_image(&Moebius::reciprocal(), &k, &img);
    }

    #[test]
    fn line_maps_to_circle() {
        // Cayley sends the real axis to the unit circle and H to the disk.
        let real_axis = Circle::line(c(0.0, 0.0), c(1.0, 0.0), true).unwrap();
        let img = map_circle(&Moebius::cayley(), &real_axis);
        assert!(img.approx_eq(&Circle::disk(c(0.0, 0.0), 1.0).unwrap(), 1e-12), "{img:?}");
    }

    #[test]
    fn separations() {
        let a = Circle::disk(c(0.0, 0.0), 1.0).unwrap();
        let b = Circle::disk(c(3.0, 0.0), 1.0).unwrap();
        assert!((a.separation(&b) - 1.0).abs() < 1e-15);
        let t = Circle::disk(c(2.0, 0.0), 1.0).unwrap();
        assert!(a.separation(&t).abs() < 1e-15);
        assert_eq!(a.contact_point(&t), Some(c(1.0, 0.0)));
        let big_out = Circle::round(c(0.0, 0.0), 10.0, false).unwrap();
        assert!((a.separation(&big_out) - 9.0).abs() < 1e-15);
        assert_eq!(big_out.separation(&big_out), f64::NEG_INFINITY);
    }

    #[test]
    fn containment() {
        let outer = Circle::disk(c(0.0, 0.0), 2.0).unwrap();
        let inner = Circle::disk(c(0.5, 0.0), 1.0).unwrap();
        assert!((outer.containment_margin(&inner) - 0.5).abs() < 1e-15);
        assert!(inner.containment_margin(&outer) < 0.0);
        let half = Circle::line(c(0.0, 0.0), c(1.0, 0.0), true).unwrap();
        assert!((half.containment_margin(&Circle::disk(c(0.0, 3.0), 1.0).unwrap()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn json_forms() {
        let k = Circle::round(c(1.0, 2.0), 0.5, false).unwrap();
        let v = serde_json::to_value(k).unwrap();
        assert_eq!(v, serde_json::json!({"center":[1.0,2.0],"radius":0.5,"inside":false}));
        let l: Circle = serde_json::from_value(serde_json::json!({"line":{"point":[0.0,0.0],"direction":[0.0,2.0]},"inside":true})).unwrap();
        assert_eq!(l.shape(), CircleShape::Line { point: c(0.0, 0.0), direction: c(0.0, 1.0) });
        assert!(serde_json::from_value::<Circle>(serde_json::json!({"center":[0.0,0.0],"radius":-1.0,"inside":true})).is_err());
    }
}
