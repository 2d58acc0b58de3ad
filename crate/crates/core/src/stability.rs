//! Hausdorff distances between sampled compacts, deformations of the
//! discontinuity circle, and structural-stability probes.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fatou::{raster_itineraries, Viewport};
use crate::index::PointIndex;
use crate::kleinian::{boundary_limit_distance, limit_set_approx, schottky_check, SchottkyPairing};
use crate::piecewise::{Partition, PiecewiseMap};
use crate::prediscontinuity::{pd_up_to, Strata};
use crate::sphere::{GenCircle, Moebius, SpherePoint};

/// Directed Hausdorff distance: the largest distance from a point of `a`
/// to the set `b`.
pub fn directed(a: &[SpherePoint], b: &[SpherePoint]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(PointIndex::new(b).max_distance(a))
}

/// Chordal Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[SpherePoint], b: &[SpherePoint]) -> Result<f64> {
    Ok(directed(a, b)?.max(directed(b, a)?))
}

/// Sampling density (points per unit chordal length) at which deformation
/// tables start.
pub const START_DENSITY: f64 = 200.0;

/// Density at which refinement stops.
pub const MAX_DENSITY: f64 = 12_800.0;

/// Hausdorff distance between PD_n of two strata, refined until the
/// sampling gap is below a tenth of the distance (or the density cap is
/// reached). Returns the distance and the final density.
pub fn strata_distance(a: &Strata, b: &Strata, n: usize) -> Result<(f64, f64)> {
    let mut density = START_DENSITY;
    loop {
        let d = hausdorff(&a.samples_up_to(n, density), &b.samples_up_to(n, density))?;
        if 1.0 / density < 0.1 * d || density >= MAX_DENSITY {
            return Ok((d, density));
        }
        density *= 2.0;
    }
}

/// A one-parameter family of discontinuity circles: at parameter ε the
/// circle has center `center + center_rate·ε` and radius
/// `radius + radius_rate·ε`. Region 0 is the disc, region 1 its complement.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationSpec {
    pub center: Complex64,
    pub radius: f64,
    pub center_rate: Complex64,
    pub radius_rate: f64,
    pub schedule: Vec<f64>,
}

impl DeformationSpec {
    /// Radius `radius + rate·ε` around a fixed center.
    pub fn radius(center: Complex64, radius: f64, rate: f64, schedule: Vec<f64>) -> Self {
        DeformationSpec { center, radius, center_rate: Complex64::new(0.0, 0.0), radius_rate: rate, schedule }
    }

    pub fn circle_at(&self, eps: f64) -> Result<GenCircle> {
        let r = self.radius + self.radius_rate * eps;
        if r.is_nan() || r <= 0.0 {
            return Err(Error::validation("deformation", format!("radius {r} at parameter {eps}")));
        }
        GenCircle::circle(self.center + self.center_rate * eps, r)
    }

    pub fn partition_at(&self, eps: f64) -> Result<Partition> {
        Partition::disc_and_complement(self.circle_at(eps)?)
    }

    /// The map with branch `f` on the disc and `g` outside.
    pub fn map_at(&self, f: &Moebius, g: &Moebius, eps: f64) -> Result<PiecewiseMap> {
        PiecewiseMap::new(self.partition_at(eps)?, vec![*f, *g])
    }

    /// Checks that every scheduled parameter gives a valid partition.
    pub fn validate(&self) -> Result<()> {
        self.partition_at(0.0)?;
        self.schedule.iter().try_for_each(|&e| self.partition_at(e).map(|_| ()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityRow {
    pub eps: f64,
    pub distance: f64,
    pub density: f64,
    /// Minimal distance between the deformed circle and the limit set.
    pub boundary_limit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityTable {
    pub level: usize,
    pub rows: Vec<ContinuityRow>,
}

impl ContinuityTable {
    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.distance).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].distance < w[0].distance)
    }

    /// Ratios d(ε_{k+1}) / d(ε_k); a ratio of about one half means the
    /// distance halves with the parameter.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].distance / w[0].distance).collect()
    }
}

impl fmt::Display for ContinuityTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# level {}", self.level)?;
        writeln!(f, "{:>12} {:>14} {:>10} {:>14}", "eps", "d_H", "density", "dist(dR,L)")?;
        for r in &self.rows {
            writeln!(f, "{:>12.6} {:>14.6e} {:>10.0} {:>14.6e}", r.eps, r.distance, r.density, r.boundary_limit)?;
        }
        Ok(())
    }
}

/// Word length of the limit-set approximation used for the hypothesis
/// column.
pub const HYPOTHESIS_WORD_LEN: usize = 8;

/// d_H(PD_n(F_ε), PD_n(F_0)) over the schedule of `spec`, with the distance
/// from each deformed circle to the limit set of ⟨f, g⟩.
pub fn continuity_probe(f: &Moebius, g: &Moebius, spec: &DeformationSpec, n: usize) -> Result<ContinuityTable> {
    if n == 0 {
        return Err(Error::validation("level", "deformation tables need a level of at least 1"));
    }
    spec.validate()?;
    let base_map = spec.map_at(f, g, 0.0)?;
    let base = pd_up_to(&base_map, n)?;
    let limit = limit_set_approx(&[*f, *g], HYPOTHESIS_WORD_LEN, 1e-9)?;
    let mut rows = Vec::with_capacity(spec.schedule.len());
    for &eps in &spec.schedule {
        let map = spec.map_at(f, g, eps)?;
        let strata = pd_up_to(&map, n)?;
        let (distance, density) = strata_distance(&base, &strata, n)?;
        rows.push(ContinuityRow { eps, distance, density, boundary_limit: boundary_limit_distance(&map, &limit) });
    }
    Ok(ContinuityTable { level: n, rows })
}

/// Raster and depth settings for [`structural_stability_probe`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityParams {
    pub viewport: Viewport,
    pub width: usize,
    pub height: usize,
    pub prefix: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    /// Fraction of pixels, clean in both grids, whose prefixes agree.
    pub agreement: f64,
    pub compared: usize,
    /// d_H(PD_n(F), PD_n(F′)) for n = 0..=depth.
    pub drift: Vec<f64>,
    pub schottky: [Option<SchottkyPairing>; 2],
}

impl StabilityReport {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().copied().fold(0.0, f64::max)
    }

    /// Both maps pass the Schottky check with the boundary in a
    /// fundamental region.
    pub fn hypothesis_holds(&self) -> bool {
        self.schottky.iter().all(|s| s.as_ref().and_then(|p| p.boundary_in_fundamental_region) == Some(true))
    }

    /// High agreement, small drift and the hypothesis on both sides. Only
    /// consistency with a conjugacy is claimed, never a proof.
    pub fn consistent_with_conjugacy(&self, min_agreement: f64, max_drift: f64) -> bool {
        self.hypothesis_holds() && self.agreement >= min_agreement && self.max_drift() <= max_drift
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |s: &Option<SchottkyPairing>| match s {
            None => "not detected",
            Some(p) if p.boundary_in_fundamental_region == Some(true) => "pairing, boundary in fundamental region",
            Some(_) => "pairing, boundary not in fundamental region",
        };
        writeln!(f, "# schottky F : {}", verdict(&self.schottky[0]))?;
        writeln!(f, "# schottky F': {}", verdict(&self.schottky[1]))?;
        writeln!(f, "# itinerary agreement {:.6} over {} pixels", self.agreement, self.compared)?;
        writeln!(f, "{:>6} {:>14}", "level", "drift")?;
        for (n, d) in self.drift.iter().enumerate() {
            writeln!(f, "{:>6} {:>14.6e}", n, d)?;
        }
        Ok(())
    }
}

fn schottky_of(f: &PiecewiseMap) -> Option<SchottkyPairing> {
    let circles = f.partition().boundary_circles();
    match (f.branches(), circles.as_slice()) {
        ([a, b], [c]) => schottky_check(a, b, Some(c)),
        _ => None,
    }
}

/// Compares two maps on the same partition: itinerary agreement on a
/// raster, per-level strata drift, and the Schottky hypothesis for both.
pub fn structural_stability_probe(
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    params: &StabilityParams,
) -> Result<StabilityReport> {
    let same = f.partition().boundary_circles().len() == g.partition().boundary_circles().len()
        && f.partition().boundary_circles().iter().zip(g.partition().boundary_circles()).all(|(a, b)| a.same_locus(&b));
    if !same {
        return Err(Error::validation("same partition", "both maps must share the discontinuity set"));
    }
    let StabilityParams { viewport, width, height, prefix, depth } = *params;
    let ga = raster_itineraries(f, viewport, width, height, prefix)?;
    let gb = raster_itineraries(g, viewport, width, height, prefix)?;
    let (mut agree, mut compared) = (0usize, 0usize);
    for p in 0..width * height {
        if ga.contaminated()[p] || gb.contaminated()[p] {
            continue;
        }
        compared += 1;
        if ga.prefix(ga.classes()[p]) == gb.prefix(gb.classes()[p]) {
            agree += 1;
        }
    }
    let agreement = if compared == 0 { 0.0 } else { agree as f64 / compared as f64 };
    let (sa, sb) = (pd_up_to(f, depth)?, pd_up_to(g, depth)?);
    let drift = (0..=depth).map(|n| strata_distance(&sa, &sb, n).map(|x| x.0)).collect::<Result<Vec<f64>>>()?;
    Ok(StabilityReport { agreement, compared, drift, schottky: [schottky_of(f), schottky_of(g)] })
}
