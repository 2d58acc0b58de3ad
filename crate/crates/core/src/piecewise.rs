//! Partitions of the sphere by circle sides, piecewise Möbius maps, orbits
//! and itinerary coding.

use std::fmt;

use crate::error::{Error, Result};
use crate::sphere::{GenCircle, Moebius, Side, SpherePoint, CIRCLE_TOL};

/// A region cut out by circle sides: the set where every constraint's form
/// has the listed sign.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    constraints: Vec<(GenCircle, Side)>,
    interior: SpherePoint,
}

impl Region {
    /// A region with an explicit interior witness.
    pub fn new(constraints: Vec<(GenCircle, Side)>, interior: SpherePoint) -> Result<Self> {
        let r = Region { constraints, interior };
        if !r.contains_strictly(interior, CIRCLE_TOL) {
            return Err(Error::validation("nonempty interior", format!("sample {interior} is not strictly inside")));
        }
        Ok(r)
    }

    /// A region whose interior witness is searched for among quasi-uniform
    /// sphere samples (the deepest one is kept).
    pub fn from_constraints(constraints: Vec<(GenCircle, Side)>) -> Result<Self> {
        let depth = |p: SpherePoint| {
            constraints
                .iter()
                .map(|(k, s)| match s {
                    Side::Negative => -k.form(p),
                    Side::Positive => k.form(p),
                })
                .fold(f64::INFINITY, f64::min)
        };
        let best = sphere_samples(4096)
            .into_iter()
            .chain([SpherePoint::ZERO, SpherePoint::Infinity])
            .map(|p| (depth(p), p))
            .max_by(|x, y| x.0.total_cmp(&y.0));
        match best {
            Some((d, p)) if d > CIRCLE_TOL => Region::new(constraints, p),
            _ => Err(Error::validation("nonempty interior", "no interior sample found")),
        }
    }

    /// The whole sphere (no constraints).
    pub fn everything() -> Self {
        Region { constraints: vec![], interior: SpherePoint::ZERO }
    }

    /// The negative side of a circle.
    pub fn inside(circle: GenCircle) -> Result<Self> {
        Region::from_constraints(vec![(circle, Side::Negative)])
    }

    /// The positive side of a circle.
    pub fn outside(circle: GenCircle) -> Result<Self> {
        Region::from_constraints(vec![(circle, Side::Positive)])
    }

    pub fn constraints(&self) -> &[(GenCircle, Side)] {
        &self.constraints
    }

    pub fn interior_sample(&self) -> SpherePoint {
        self.interior
    }

    pub fn contains_closed(&self, p: SpherePoint, tol: f64) -> bool {
        self.constraints.iter().all(|(k, s)| s.holds_closed(k.form(p), tol))
    }

    /// Inside, at distance more than `margin` (in form units) from the
    /// constraint circles.
    pub fn contains_strictly(&self, p: SpherePoint, margin: f64) -> bool {
        self.constraints.iter().all(|(k, s)| match s {
            Side::Negative => k.form(p) < -margin,
            Side::Positive => k.form(p) > margin,
        })
    }
}

/// Where a point falls in a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub region: usize,
    pub on_boundary: bool,
}

/// An ordered list of regions covering the sphere. A point on a shared
/// boundary belongs to the lowest-index region whose closure contains it.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    regions: Vec<Region>,
}

/// Number of sphere samples used by partition validation.
pub const PARTITION_SAMPLES: usize = 10_000;

impl Partition {
    /// Validates coverage and disjointness on quasi-uniform sphere samples.
    pub fn new(regions: Vec<Region>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::validation("coverage", "a partition needs at least one region"));
        }
        if regions.len() > 15 {
            return Err(Error::validation("region count", "at most 15 regions are supported"));
        }
        let p = Partition { regions };
        p.check(&sphere_samples(PARTITION_SAMPLES))?;
        Ok(p)
    }

    /// The regions inside and outside one circle.
    pub fn disc_and_complement(circle: GenCircle) -> Result<Self> {
        Partition::new(vec![Region::inside(circle)?, Region::outside(circle)?])
    }

    fn check(&self, samples: &[SpherePoint]) -> Result<()> {
        for &p in samples {
            let strict = self.regions.iter().filter(|r| r.contains_strictly(p, 0.0)).count();
            if strict > 1 {
                return Err(Error::validation("disjointness", format!("{p} lies inside {strict} regions")));
            }
            if strict == 0 {
                let on_circle =
                    self.regions.iter().flat_map(|r| r.constraints.iter()).any(|(k, _)| k.form(p).abs() <= CIRCLE_TOL);
                if !on_circle {
                    return Err(Error::validation("coverage", format!("{p} lies in no region")));
                }
            }
        }
        Ok(())
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Distinct constraint circles, in order of first appearance.
    pub fn boundary_circles(&self) -> Vec<GenCircle> {
        let mut out: Vec<GenCircle> = Vec::new();
        for (k, _) in self.regions.iter().flat_map(|r| r.constraints.iter()) {
            if !out.iter().any(|c| c.same_locus(k)) {
                out.push(k.canonical());
            }
        }
        out
    }

    pub fn locate(&self, p: SpherePoint) -> Location {
        for (i, r) in self.regions.iter().enumerate() {
            let mut on_boundary = false;
            let mut inside = true;
            for (k, s) in &r.constraints {
                let v = k.form(p);
                if !s.holds_closed(v, CIRCLE_TOL) {
                    inside = false;
                    break;
                }
                on_boundary |= v.abs() <= CIRCLE_TOL;
            }
            if inside {
                return Location { region: i, on_boundary };
            }
        }
        // only reachable through rounding in a validated partition
        Location { region: 0, on_boundary: true }
    }

    /// Whether `p` is within `tol` (form units) of some constraint circle.
    pub fn near_boundary(&self, p: SpherePoint, tol: f64) -> bool {
        self.regions.iter().flat_map(|r| r.constraints.iter()).any(|(k, _)| k.form(p).abs() <= tol)
    }
}

/// A piecewise Möbius map: region m is mapped by branch m.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMap {
    partition: Partition,
    branches: Vec<Moebius>,
}

impl PiecewiseMap {
    pub fn new(partition: Partition, branches: Vec<Moebius>) -> Result<Self> {
        if partition.len() != branches.len() {
            return Err(Error::validation(
                "branch count",
                format!("{} regions but {} branches", partition.len(), branches.len()),
            ));
        }
        Ok(PiecewiseMap { partition, branches })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn branches(&self) -> &[Moebius] {
        &self.branches
    }

    pub fn branch(&self, m: usize) -> &Moebius {
        &self.branches[m]
    }

    pub fn locate(&self, p: SpherePoint) -> Location {
        self.partition.locate(p)
    }

    pub fn eval(&self, p: SpherePoint) -> SpherePoint {
        self.branches[self.partition.locate(p).region].apply(p)
    }

    /// `[p, F(p), …, Fⁿ(p)]`.
    pub fn orbit(&self, p: SpherePoint, n: usize) -> Vec<SpherePoint> {
        let mut out = Vec::with_capacity(n + 1);
        let mut q = p;
        out.push(q);
        for _ in 0..n {
            q = self.eval(q);
            out.push(q);
        }
        out
    }

    /// The first `k` symbols of the itinerary of `p`; symbol j is the region
    /// of Fʲ(p), starting at j = 0.
    pub fn itinerary(&self, p: SpherePoint, k: usize) -> Itinerary {
        let mut symbols = Vec::with_capacity(k);
        let mut boundary = Vec::with_capacity(k);
        let mut q = p;
        for _ in 0..k {
            let loc = self.partition.locate(q);
            symbols.push(loc.region as u8);
            boundary.push(loc.on_boundary);
            q = self.branches[loc.region].apply(q);
        }
        Itinerary { symbols, boundary }
    }

    /// The composition f_{s[len−1]} ∘ … ∘ f_{s[0]} of the branches along a
    /// symbol sequence.
    pub fn compose_word(&self, symbols: &[u8]) -> Moebius {
        symbols.iter().fold(Moebius::identity(), |acc, &s| self.branches[s as usize].compose(&acc))
    }
}

/// A finite itinerary with per-symbol boundary flags.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Itinerary {
    pub symbols: Vec<u8>,
    pub boundary: Vec<bool>,
}

impl Itinerary {
    pub fn from_symbols(symbols: Vec<u8>) -> Self {
        let boundary = vec![false; symbols.len()];
        Itinerary { symbols, boundary }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn touches_boundary(&self) -> bool {
        self.boundary.iter().any(|&b| b)
    }

    pub fn periodicity(&self) -> Option<Periodicity> {
        detect_periodicity(&self.symbols)
    }
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// Observed preperiod and period of a finite symbol sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
}

/// Smallest period q (then smallest preperiod p) such that the tail from p
/// repeats with period q, the tail spans at least 3q symbols, and it covers
/// at least half of the sequence. Sequences shorter than 8 are not judged.
pub fn detect_periodicity(symbols: &[u8]) -> Option<Periodicity> {
    let n = symbols.len();
    if n < 8 {
        return None;
    }
    let min_tail = n.div_ceil(2);
    for q in 1..=n / 3 {
        let mut p = n - q;
        while p > 0 && symbols[p - 1] == symbols[p - 1 + q] {
            p -= 1;
        }
        let tail = n - p;
        if tail >= 3 * q && tail >= min_tail {
            return Some(Periodicity { preperiod: p, period: q });
        }
    }
    None
}

/// `n` quasi-uniform points on the sphere (a Fibonacci lattice pushed
/// through stereographic projection).
pub fn sphere_samples(n: usize) -> Vec<SpherePoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            SpherePoint::from_unit_vector([r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Rotation number of a circle map on the positive interval [lo, hi),
/// measured in the logarithmic coordinate ln(x/lo)/ln(hi/lo).
pub fn log_rotation_number(f: &PiecewiseMap, x0: f64, n: usize, lo: f64, hi: f64) -> f64 {
    let scale = (hi / lo).ln();
    let angle = |x: f64| (x / lo).ln() / scale;
    let mut x = x0;
    let mut total = 0.0;
    for _ in 0..n {
        let y = match f.eval(SpherePoint::new(x, 0.0)) {
            SpherePoint::Finite(z) => z.re,
            SpherePoint::Infinity => return f64::NAN,
        };
        total += (angle(y) - angle(x)).rem_euclid(1.0);
        x = y;
    }
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn whole_sphere() -> PiecewiseMap {
        let unit = GenCircle::circle(Complex64::new(0.0, 0.0), 1.0).unwrap();
        PiecewiseMap::new(
            Partition::disc_and_complement(unit).unwrap(),
            vec![
                Moebius::scaling(Complex64::new(2.0, 0.0)).unwrap(),
                Moebius::scaling(Complex64::new(2.0 / 3.0, 0.0)).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn locate_examples() {
        let f = whole_sphere();
        assert_eq!(f.locate(0.5.into()), Location { region: 0, on_boundary: false });
        assert_eq!(f.locate(3.0.into()), Location { region: 1, on_boundary: false });
        assert_eq!(f.locate(1.0.into()), Location { region: 0, on_boundary: true });
        assert_eq!(f.locate(SpherePoint::Infinity).region, 1);
    }

    #[test]
    fn eval_and_orbit() {
        let f = whole_sphere();
        assert!(crate::sphere::chordal(f.eval(0.75.into()), 1.5.into()) < 1e-15);
        assert!(crate::sphere::chordal(f.eval(1.5.into()), 1.0.into()) < 1e-15);
        let o = f.orbit(0.75.into(), 2);
        assert_eq!(o.len(), 3);
        assert!(crate::sphere::chordal(o[2], 1.0.into()) < 1e-15);
        assert_eq!(f.orbit(0.3.into(), 0), vec![SpherePoint::new(0.3, 0.0)]);
    }

    #[test]
    fn periodicity_examples() {
        assert_eq!(detect_periodicity(&[1; 12]), Some(Periodicity { preperiod: 0, period: 1 }));
        let s: Vec<u8> = [0, 1, 1].iter().cycle().take(12).copied().collect();
        assert_eq!(detect_periodicity(&s), Some(Periodicity { preperiod: 0, period: 3 }));
        let s = [0, 0, 1, 1, 1, 1, 1, 1, 1, 1];
        assert_eq!(detect_periodicity(&s), Some(Periodicity { preperiod: 2, period: 1 }));
        assert_eq!(detect_periodicity(&[0, 1, 2, 3, 4, 5, 6, 7]), None);
        assert_eq!(detect_periodicity(&[1, 1, 1]), None);
    }

    #[test]
    fn uncovered_partition_rejected() {
        let unit = GenCircle::circle(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let other = GenCircle::circle(Complex64::new(5.0, 0.0), 1.0).unwrap();
        let err = Partition::new(vec![Region::inside(unit).unwrap(), Region::inside(other).unwrap()]);
        assert!(matches!(err, Err(Error::Validation { invariant: "coverage", .. })));
        let overlap = Partition::new(vec![Region::inside(unit).unwrap(), Region::everything()]);
        assert!(matches!(overlap, Err(Error::Validation { invariant: "disjointness", .. })));
    }

    #[test]
    fn strip_regions() {
        // the strip 0 < Re z < 1 and the two half-planes beside it
        let left = GenCircle::line(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let right = GenCircle::line(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let p = Partition::new(vec![
            Region::from_constraints(vec![(left, Side::Positive), (right, Side::Negative)]).unwrap(),
            Region::from_constraints(vec![(left, Side::Negative)]).unwrap(),
            Region::from_constraints(vec![(right, Side::Positive)]).unwrap(),
        ])
        .unwrap();
        assert_eq!(p.locate(SpherePoint::new(0.5, 7.0)).region, 0);
        assert_eq!(p.locate(SpherePoint::new(-0.5, 7.0)).region, 1);
        assert_eq!(p.locate(SpherePoint::new(1.5, 7.0)).region, 2);
        assert_eq!(p.boundary_circles().len(), 2);
    }
}
