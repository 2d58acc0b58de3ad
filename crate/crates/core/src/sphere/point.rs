use std::fmt;

use num_complex::Complex64;

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint::Finite(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::from(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Position on the unit sphere in R³, with 0 at the south pole and ∞ at
    /// the north pole.
    pub fn to_unit_vector(&self) -> [f64; 3] {
        match *self {
            SpherePoint::Infinity => [0.0, 0.0, 1.0],
            SpherePoint::Finite(z) => {
                let r2 = z.norm_sqr();
                if r2 <= 1.0 {
                    let s = 1.0 + r2;
                    [2.0 * z.re / s, 2.0 * z.im / s, (r2 - 1.0) / s]
                } else {
                    let w = z.inv();
                    let q = w.norm_sqr();
                    let s = 1.0 + q;
                    [2.0 * w.re / s, -2.0 * w.im / s, (1.0 - q) / s]
                }
            }
        }
    }

    /// Inverse of [`to_unit_vector`](Self::to_unit_vector). The input is
    /// normalized first.
    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let [x, y, z] = [v[0] / n, v[1] / n, v[2] / n];
        if z <= 0.0 {
            SpherePoint::Finite(Complex64::new(x, y) / (1.0 - z))
        } else {
            let w = Complex64::new(x, -y) / (1.0 + z);
            if w == Complex64::new(0.0, 0.0) {
                SpherePoint::Infinity
            } else {
                SpherePoint::from(w.inv())
            }
        }
    }

    /// A unit vector (u, v) in C² with u/v equal to this point.
    pub fn homogeneous(&self) -> (Complex64, Complex64) {
        match *self {
            SpherePoint::Infinity => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            SpherePoint::Finite(z) => {
                let n = (1.0 + z.norm_sqr()).sqrt();
                if z.norm() <= 1.0 {
                    (z / n, Complex64::new(1.0 / n, 0.0))
                } else {
                    // scale by |z| first so nothing overflows
                    let m = z.norm();
                    let k = (1.0 + 1.0 / (m * m)).sqrt();
                    (z / (m * k), Complex64::new(1.0 / (m * k), 0.0))
                }
            }
        }
    }

    /// The point u/v; v = 0 gives ∞.
    pub fn from_homogeneous(u: Complex64, v: Complex64) -> Self {
        if v == Complex64::new(0.0, 0.0) {
            return SpherePoint::Infinity;
        }
        SpherePoint::from(u / v)
    }
}

impl From<Complex64> for SpherePoint {
    /// Non-finite values collapse to ∞.
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl From<f64> for SpherePoint {
    fn from(x: f64) -> Self {
        SpherePoint::new(x, 0.0)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// Chordal distance on the unit sphere: 2|p − q| / √((1+|p|²)(1+|q|²)).
pub fn chordal(p: SpherePoint, q: SpherePoint) -> f64 {
    let a = p.to_unit_vector();
    let b = q.to_unit_vector();
    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    d.min(2.0)
}
