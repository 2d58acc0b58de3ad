use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use super::moebius::Moebius;
use super::point::SpherePoint;
use crate::error::{Error, Result};

/// Tolerance for "on the circle" and tangency, in (approximately) chordal
/// units.
pub const CIRCLE_TOL: f64 = 1e-9;

/// Which sign of the circle's form a region lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    /// Strict membership.
    pub fn holds(self, value: f64) -> bool {
        match self {
            Side::Negative => value < 0.0,
            Side::Positive => value > 0.0,
        }
    }

    /// Membership in the closed side, with tolerance.
    pub fn holds_closed(self, value: f64, tol: f64) -> bool {
        match self {
            Side::Negative => value <= tol,
            Side::Positive => value >= -tol,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Negative => Side::Positive,
            Side::Positive => Side::Negative,
        }
    }
}

/// A generalized circle: the locus a|z|² + b z̄ + b̄ z + d = 0.
///
/// Coefficients are stored scaled by a positive factor so that
/// |b|² − ad = 1. Positive scaling keeps the sign of the form, so a circle
/// also determines two sides. With this scaling [`form`](Self::form) is
/// comparable to the signed chordal distance from the locus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenCircle {
    a: f64,
    b: Complex64,
    d: f64,
}

impl GenCircle {
    pub fn new(a: f64, b: Complex64, d: f64) -> Result<Self> {
        let scale = a.abs().max(b.norm()).max(d.abs());
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::DegenerateCircle(0.0));
        }
        let (a, b, d) = (a / scale, b / scale, d / scale);
        let disc = b.norm_sqr() - a * d;
        if disc <= 1e-14 {
            return Err(Error::DegenerateCircle(disc * scale * scale));
        }
        let s = disc.sqrt();
        Ok(GenCircle { a: a / s, b: b / s, d: d / s })
    }

    /// The circle |z − center| = radius; the disc is the negative side.
    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::DegenerateCircle(radius));
        }
        GenCircle::new(1.0, -center, center.norm_sqr() - radius * radius)
    }

    /// The line through `point` orthogonal to `normal`; the negative side is
    /// the half-plane the normal points away from.
    pub fn line(point: Complex64, normal: Complex64) -> Result<Self> {
        GenCircle::new(0.0, normal, -2.0 * (normal.conj() * point).re)
    }

    pub fn coefficients(&self) -> (f64, Complex64, f64) {
        (self.a, self.b, self.d)
    }

    pub fn is_line(&self) -> bool {
        self.a.abs() <= 1e-12
    }

    /// Center and euclidean radius, or `None` for a line.
    pub fn center_radius(&self) -> Option<(Complex64, f64)> {
        if self.is_line() {
            None
        } else {
            Some((-self.b / self.a, 1.0 / self.a.abs()))
        }
    }

    /// The homogeneous form Q(u, v) for a unit representative (u, v) of p.
    pub fn form(&self, p: SpherePoint) -> f64 {
        let (u, v) = p.homogeneous();
        self.a * u.norm_sqr() + 2.0 * (self.b.conj() * u * v.conj()).re + self.d * v.norm_sqr()
    }

    /// Same circle with the opposite sides.
    pub fn flipped(&self) -> Self {
        GenCircle { a: -self.a, b: -self.b, d: -self.d }
    }

    /// Sign-fixed representative: a > 0 for circles, and for lines
    /// Re b > 0 (or Im b > 0 when Re b = 0). Idempotent.
    pub fn canonical(&self) -> Self {
        let mut c = *self;
        if c.a.abs() <= 1e-12 && c.a != 0.0 {
            c = GenCircle::new(0.0, c.b, c.d).unwrap_or(c);
        }
        let positive = if c.a != 0.0 {
            c.a > 0.0
        } else if c.b.re.abs() > 1e-15 {
            c.b.re > 0.0
        } else {
            c.b.im > 0.0
        };
        if positive {
            c
        } else {
            c.flipped()
        }
    }

    /// The locus normalization: a = 1 for circles, |b| = 1 for lines, with
    /// the sign of [`canonical`](Self::canonical).
    pub fn locus_form(&self) -> (f64, Complex64, f64) {
        let c = self.canonical();
        let s = if c.a != 0.0 { c.a } else { c.b.norm() };
        (c.a / s, c.b / s, c.d / s)
    }

    /// Whether both circles describe the same locus (canonical coefficients
    /// within `CIRCLE_TOL`).
    pub fn same_locus(&self, other: &GenCircle) -> bool {
        let (p, q) = (self.canonical(), other.canonical());
        (p.a - q.a).abs() <= CIRCLE_TOL && (p.b - q.b).norm() <= CIRCLE_TOL && (p.d - q.d).abs() <= CIRCLE_TOL
    }

    /// The rotation chart in which this circle is |w| = ρ with the negative
    /// side inside.
    pub fn chart(&self) -> CircleChart {
        let n = [self.b.re, self.b.im, 0.5 * (self.a - self.d)];
        let t = 0.5 * (self.a + self.d);
        let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let center = SpherePoint::from_unit_vector([-n[0], -n[1], -n[2]]);
        let (u, v) = center.homogeneous();
        let to_std = Moebius::new(v, -u, u.conj(), v.conj()).expect("rotation matrices are unimodular");
        let rho = if t >= 0.0 { 1.0 / (nn + t) } else { nn - t };
        CircleChart { to_std, from_std: to_std.inverse(), rho }
    }
}

impl fmt::Display for GenCircle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.center_radius() {
            Some((c, r)) => write!(f, "circle(center {}{:+}i, radius {})", c.re, c.im, r),
            None => write!(f, "line({} zbar + conj z {:+})", self.b, self.d),
        }
    }
}

/// A sphere rotation taking a circle to the latitude circle |w| = ρ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleChart {
    to_std: Moebius,
    from_std: Moebius,
    rho: f64,
}

impl CircleChart {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn to_std(&self) -> &Moebius {
        &self.to_std
    }

    /// The point at angle θ.
    pub fn point(&self, theta: f64) -> SpherePoint {
        self.from_std.apply(SpherePoint::Finite(Complex64::from_polar(self.rho, theta)))
    }

    /// The angle of the point in the chart, in [0, 2π). Points at the chart
    /// poles get angle 0.
    pub fn angle(&self, p: SpherePoint) -> f64 {
        match self.to_std.apply(p) {
            SpherePoint::Finite(w) if w.norm() > 0.0 => w.arg().rem_euclid(TAU),
            _ => 0.0,
        }
    }

    /// Chordal length of the arc of the circle per radian.
    pub fn chordal_speed(&self) -> f64 {
        2.0 * self.rho / (1.0 + self.rho * self.rho)
    }
}

/// Transforms a circle so that `map_circle(M, C)` is the image of C under M,
/// with the sides carried along. Fails when the image is too small to be
/// represented (chordal radius near 1e-8 and below).
pub fn map_circle(m: &Moebius, c: &GenCircle) -> Result<GenCircle> {
    let [n11, n12, n21, n22] = m.inverse().coefficients();
    let (a, b, d) = (c.a, c.b, c.d);
    let h00 = n11.conj() * (a * n11 + b * n21) + n21.conj() * (b.conj() * n11 + d * n21);
    let h01 = n11.conj() * (a * n12 + b * n22) + n21.conj() * (b.conj() * n12 + d * n22);
    let h11 = n12.conj() * (a * n12 + b * n22) + n22.conj() * (b.conj() * n12 + d * n22);
    GenCircle::new(h00.re, h01, h11.re)
}

/// Intersection of two distinct circles, as angles in the first circle's
/// chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Intersection {
    pub angles: Vec<f64>,
    pub tangent: bool,
}

pub fn intersection_angles(c1: &GenCircle, c2: &GenCircle) -> Result<Intersection> {
    if c1.same_locus(c2) {
        return Err(Error::IdenticalLoci);
    }
    let chart = c1.chart();
    let (a, b, d) = map_circle(chart.to_std(), c2)?.coefficients();
    let rho = chart.rho;
    let amp = 2.0 * rho * b.norm();
    let offset = a * rho * rho + d;
    let scale = 1.0 + rho * rho;
    let none = Intersection { angles: vec![], tangent: false };
    if amp <= 1e-14 {
        if offset.abs() / scale <= CIRCLE_TOL {
            return Err(Error::IdenticalLoci);
        }
        return Ok(none);
    }
    let gap = (amp - offset.abs()) / scale;
    let beta = b.arg();
    if gap < -CIRCLE_TOL {
        return Ok(none);
    }
    if gap <= CIRCLE_TOL {
        let theta = if offset < 0.0 { beta } else { beta + std::f64::consts::PI };
        return Ok(Intersection { angles: vec![theta.rem_euclid(TAU)], tangent: true });
    }
    let kappa = (-offset / amp).clamp(-1.0, 1.0);
    let delta = kappa.acos();
    Ok(Intersection { angles: vec![(beta - delta).rem_euclid(TAU), (beta + delta).rem_euclid(TAU)], tangent: false })
}

/// The 0, 1 or 2 points common to two distinct circles.
pub fn circle_intersect(c1: &GenCircle, c2: &GenCircle) -> Result<Vec<SpherePoint>> {
    let chart = c1.chart();
    Ok(intersection_angles(c1, c2)?.angles.into_iter().map(|t| chart.point(t)).collect())
}
