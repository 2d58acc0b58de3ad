use std::fmt;

use num_complex::Complex64;

use super::point::SpherePoint;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance on trace² used by [`Moebius::classify`].
pub const TRACE_TOL: f64 = 1e-9;

/// A Möbius transformation z ↦ (az + b)/(cz + d), stored with determinant 1.
///
/// The sign of the coefficients is fixed so that Re(a + d) ≥ 0, with ties
/// broken by Im(a + d) ≥ 0 and then by the first nonzero of a, b, c.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

/// Conjugacy type of a Möbius map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoebiusKind {
    Identity,
    Parabolic,
    Elliptic,
    Hyperbolic,
    Loxodromic,
}

impl MoebiusKind {
    /// Hyperbolic or strictly loxodromic.
    pub fn is_loxodromic(self) -> bool {
        matches!(self, MoebiusKind::Hyperbolic | MoebiusKind::Loxodromic)
    }
}

impl fmt::Display for MoebiusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoebiusKind::Identity => "identity",
            MoebiusKind::Parabolic => "parabolic",
            MoebiusKind::Elliptic => "elliptic",
            MoebiusKind::Hyperbolic => "hyperbolic",
            MoebiusKind::Loxodromic => "strictly-loxodromic",
        };
        f.write_str(s)
    }
}

/// A fixed point together with the derivative of the map there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    pub point: SpherePoint,
    pub multiplier: Complex64,
}

/// Result of [`Moebius::classify`].
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kind: MoebiusKind,
    pub trace_sq: Complex64,
    /// Empty for the identity, one point for parabolic maps, two otherwise.
    pub fixed_points: Vec<FixedPoint>,
    /// The fixed point whose multiplier has modulus below one.
    pub attracting: Option<SpherePoint>,
}

fn sign_key(z: Complex64) -> Option<bool> {
    const EPS: f64 = 1e-15;
    if z.re.abs() > EPS {
        Some(z.re > 0.0)
    } else if z.im.abs() > EPS {
        Some(z.im > 0.0)
    } else {
        None
    }
}

impl Moebius {
    /// Builds and normalizes a map; rejects a vanishing determinant.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(scale.is_finite()) || scale == 0.0 {
            return Err(Error::Degenerate(0.0));
        }
        let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
        let det = a * d - b * c;
        if det.norm() <= 1e-14 {
            return Err(Error::Degenerate(det.norm() * scale * scale));
        }
        let s = det.sqrt();
        Ok(Moebius::unimodular(a / s, b / s, c / s, d / s))
    }

    // Entries known to have determinant 1; only the sign is fixed.
    fn unimodular(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        let flip = [a + d, a, b, c].into_iter().find_map(sign_key).map(|positive| !positive).unwrap_or(false);
        if flip {
            Moebius { a: -a, b: -b, c: -c, d: -d }
        } else {
            Moebius { a, b, c, d }
        }
    }

    pub fn from_reals(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> Result<Self> {
        let z = |p: (f64, f64)| Complex64::new(p.0, p.1);
        Moebius::new(z(a), z(b), z(c), z(d))
    }

    pub fn identity() -> Self {
        Moebius { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// z ↦ kz.
    pub fn scaling(k: Complex64) -> Result<Self> {
        Moebius::new(k, ZERO, ZERO, ONE)
    }

    /// z ↦ z + t.
    pub fn translation(t: Complex64) -> Self {
        Moebius::new(ONE, t, ZERO, ONE).expect("translations are nondegenerate")
    }

    /// z ↦ kz + t.
    pub fn affine(k: Complex64, t: Complex64) -> Result<Self> {
        Moebius::new(k, t, ZERO, ONE)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace_sq(&self) -> Complex64 {
        let t = self.a + self.d;
        t * t
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => SpherePoint::from_homogeneous(self.a, self.c),
            SpherePoint::Finite(z) => {
                if z.norm() > 1.0 {
                    let w = z.inv();
                    SpherePoint::from_homogeneous(self.a + self.b * w, self.c + self.d * w)
                } else {
                    SpherePoint::from_homogeneous(self.a * z + self.b, self.c * z + self.d)
                }
            }
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (e, f, g, h) = (other.a, other.b, other.c, other.d);
        // det is multiplicative; rescaling long products would only add
        // cancellation error
        Moebius::unimodular(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn inverse(&self) -> Moebius {
        Moebius::unimodular(self.d, -self.b, -self.c, self.a)
    }

    /// The n-th iterate (negative n iterates the inverse).
    pub fn pow(&self, n: i32) -> Moebius {
        let base = if n < 0 { self.inverse() } else { *self };
        (0..n.unsigned_abs()).fold(Moebius::identity(), |acc, _| acc.compose(&base))
    }

    pub fn is_identity(&self) -> bool {
        self.b.norm() <= TRACE_TOL && self.c.norm() <= TRACE_TOL && (self.a - self.d).norm() <= TRACE_TOL
    }

    pub fn fixed_points(&self) -> Vec<SpherePoint> {
        self.classify().fixed_points.into_iter().map(|f| f.point).collect()
    }

    pub fn classify(&self) -> Classification {
        let tr2 = self.trace_sq();
        if self.is_identity() {
            return Classification {
                kind: MoebiusKind::Identity,
                trace_sq: tr2,
                fixed_points: vec![],
                attracting: None,
            };
        }
        let parabolic = (tr2 - 4.0).norm() <= TRACE_TOL;
        let kind = if parabolic {
            MoebiusKind::Parabolic
        } else if tr2.im.abs() <= TRACE_TOL && tr2.re >= -TRACE_TOL && tr2.re < 4.0 {
            MoebiusKind::Elliptic
        } else if tr2.im.abs() <= TRACE_TOL && tr2.re > 4.0 {
            MoebiusKind::Hyperbolic
        } else {
            MoebiusKind::Loxodromic
        };
        let points = self.solve_fixed_points(parabolic);
        let fixed_points: Vec<FixedPoint> =
            points.into_iter().map(|point| FixedPoint { point, multiplier: self.fixed_multiplier(point) }).collect();
        let attracting = if kind.is_loxodromic() {
            fixed_points.iter().find(|f| f.multiplier.norm() < 1.0).map(|f| f.point)
        } else {
            None
        };
        Classification { kind, trace_sq: tr2, fixed_points, attracting }
    }

    fn fixed_multiplier(&self, p: SpherePoint) -> Complex64 {
        match p {
            SpherePoint::Infinity => self.d / self.a,
            SpherePoint::Finite(z) => {
                if self.c.norm() <= 1e-14 {
                    self.a / self.d
                } else {
                    let den = self.c * z + self.d;
                    (den * den).inv()
                }
            }
        }
    }

    // Roots of c z² + (d − a) z − b = 0, one of them possibly ∞.
    fn solve_fixed_points(&self, parabolic: bool) -> Vec<SpherePoint> {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let disc = if parabolic { ZERO } else { self.trace_sq() - 4.0 };
        let root = disc.sqrt();
        if c.norm() <= 1e-14 {
            // affine: ∞ is fixed, and (d − a) z = b gives the other
            if parabolic || (d - a).norm() <= 1e-14 {
                return vec![SpherePoint::Infinity];
            }
            return vec![SpherePoint::from(b / (d - a)), SpherePoint::Infinity];
        }
        let p = a - d + root;
        let m = a - d - root;
        let big = if p.norm() >= m.norm() { p } else { m };
        if parabolic {
            return vec![SpherePoint::from((a - d) / (2.0 * c))];
        }
        if big.norm() == 0.0 {
            return vec![SpherePoint::ZERO];
        }
        let z1 = big / (2.0 * c);
        // product of the roots is −b/c
        let z2 = -b / (c * z1);
        vec![SpherePoint::from(z1), SpherePoint::from(z2)]
    }
}

impl fmt::Display for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} z + {}) / ({} z + {})", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::chordal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn apply_examples() {
        let two = Moebius::scaling(c(2.0, 0.0)).unwrap();
        assert_eq!(two.apply(1.0.into()), SpherePoint::new(2.0, 0.0));
        assert_eq!(two.apply(SpherePoint::Infinity), SpherePoint::Infinity);
        let m = Moebius::new(ONE, ZERO, ONE, ONE).unwrap();
        assert_eq!(m.apply((-1.0).into()), SpherePoint::Infinity);
        assert!(chordal(m.apply(SpherePoint::Infinity), 1.0.into()) < 1e-15);
    }

    #[test]
    fn normalization() {
        let m = Moebius::new(c(3.0, 1.0), c(0.5, 0.0), c(-2.0, 4.0), c(0.0, -1.0)).unwrap();
        let [a, b, cc, d] = m.coefficients();
        assert!((a * d - b * cc - 1.0).norm() < 1e-12);
        let t = a + d;
        assert!(t.re > 0.0 || (t.re == 0.0 && t.im >= 0.0));
        let neg = Moebius::new(-c(3.0, 1.0), -c(0.5, 0.0), -c(-2.0, 4.0), -c(0.0, -1.0)).unwrap();
        assert_eq!(m, neg);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(Moebius::new(ONE, c(-0.6, 0.0), ONE, c(-0.6, 0.0)), Err(Error::Degenerate(_))));
        assert!(Moebius::new(ZERO, ZERO, ZERO, ZERO).is_err());
    }

    fn close(m: &Moebius, n: &Moebius) -> bool {
        m.coefficients().iter().zip(n.coefficients()).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn compose_examples() {
        let two = Moebius::scaling(c(2.0, 0.0)).unwrap();
        let plus = Moebius::translation(ONE);
        let m = two.compose(&plus);
        assert!(close(&m, &Moebius::affine(c(2.0, 0.0), c(2.0, 0.0)).unwrap()));
        let f = Moebius::scaling(c(0.0, 1.0)).unwrap();
        let g = Moebius::affine(c(0.0, -1.0), c(1.0, 1.0)).unwrap();
        assert!(close(&f.compose(&g), &Moebius::translation(c(-1.0, 1.0))));
        assert!(close(&g.compose(&f), &Moebius::translation(c(1.0, 1.0))));
        assert!(m.compose(&m.inverse()).is_identity());
    }

    #[test]
    fn classify_examples() {
        let lambda = Complex64::from_polar(0.95, 2.0 * std::f64::consts::PI / 3.0);
        let cl = Moebius::scaling(lambda).unwrap().classify();
        assert_eq!(cl.kind, MoebiusKind::Loxodromic);
        assert_eq!(cl.attracting, Some(SpherePoint::ZERO));

        let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let cl = Moebius::scaling(rot).unwrap().classify();
        assert_eq!(cl.kind, MoebiusKind::Elliptic);
        let pts: Vec<_> = cl.fixed_points.iter().map(|f| f.point).collect();
        assert!(pts.contains(&SpherePoint::ZERO) && pts.contains(&SpherePoint::Infinity));

        let par = Moebius::new(ONE, ZERO, ONE, ONE).unwrap().classify();
        assert_eq!(par.kind, MoebiusKind::Parabolic);
        assert_eq!(par.fixed_points.len(), 1);
        assert!(chordal(par.fixed_points[0].point, SpherePoint::ZERO) < 1e-15);

        let hyp = Moebius::scaling(c(2.0, 0.0)).unwrap().classify();
        assert_eq!(hyp.kind, MoebiusKind::Hyperbolic);
        assert_eq!(hyp.attracting, Some(SpherePoint::Infinity));
        assert_eq!(Moebius::identity().classify().kind, MoebiusKind::Identity);
    }

    #[test]
    fn fixed_points_are_fixed() {
        let m = Moebius::new(c(1.0, 1.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, -1.0)).unwrap();
        let cl = m.classify();
        assert_eq!(cl.kind, MoebiusKind::Parabolic);
        assert!(chordal(cl.fixed_points[0].point, (-1.0).into()) < 1e-9);
        let m = Moebius::new(c(2.0, 1.0), c(1.0, 0.0), c(1.0, 1.0), c(1.0, 0.0)).unwrap();
        for p in m.fixed_points() {
            assert!(chordal(m.apply(p), p) < 1e-12);
        }
    }

    #[test]
    fn pow_matches_repeated_compose() {
        let m = Moebius::new(c(1.0, 0.2), c(0.3, 0.0), c(0.1, 0.1), c(0.9, 0.0)).unwrap();
        let p = SpherePoint::new(0.4, -0.2);
        let mut q = p;
        for _ in 0..5 {
            q = m.apply(q);
        }
        assert!(chordal(m.pow(5).apply(p), q) < 1e-12);
        assert!(chordal(m.pow(-5).apply(q), p) < 1e-12);
    }
}
