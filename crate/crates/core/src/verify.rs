//! Invariant checks on a single scene, as run by `pcm verify`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use std::fmt;

use crate::error::{Error, Result};
use crate::fatou::{raster_itineraries, Viewport};
use crate::piecewise::{sphere_samples, PiecewiseMap, PARTITION_SAMPLES};
use crate::prediscontinuity::{pd_up_to, Strata};
use crate::render::{class_colors, overlay_pixels, render, BLACK};
use crate::scene::SceneConfig;
use crate::sphere::{chordal, Arc, SpherePoint};

/// Arc samples per check.
pub const ARC_SAMPLES: usize = 16;
/// Region membership tolerance on the constraint forms.
pub const REGION_TOL: f64 = 1e-9;
/// Chordal tolerance for forward images of arcs.
pub const FORWARD_TOL: f64 = 1e-8;
/// Side of the small renders used by the raster checks.
pub const VERIFY_RES: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported but not a failure.
    Note,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Note => "NOTE",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Check { name, status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }
}

pub struct VerifyReport {
    pub scene: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# verify {}", self.scene)?;
        for c in &self.checks {
            writeln!(f, "{:<22} {:<4}  {}", c.name, c.status, c.detail)?;
        }
        Ok(())
    }
}

/// Runs every check on the scene at its own depth and prefix length.
/// Truncated strata are returned as the error.
pub fn verify(scene: &SceneConfig) -> Result<VerifyReport> {
    let f = scene.map();
    let strata = pd_up_to(f, scene.depth())?;
    let small = scene.with_settings(Some((VERIFY_RES, VERIFY_RES)), None, None)?;
    let mut checks = vec![partition_check(f), branch_check(f)];
    checks.extend(strata_checks(f, &strata));
    checks.push(itinerary_check(&small)?);
    let a = render(&small)?;
    let b = render(&small)?;
    checks.push(Check::new("determinism", a.image == b.image, format!("two {VERIFY_RES}x{VERIFY_RES} renders")));
    checks.push(overlay_check(&small, &strata, &a.image));
    checks.push(color_check(&small)?);
    Ok(VerifyReport { scene: scene.name().to_string(), checks })
}

fn partition_check(f: &PiecewiseMap) -> Check {
    let regions = f.partition().regions();
    let bad = sphere_samples(PARTITION_SAMPLES)
        .into_iter()
        .filter(|&p| {
            let closed = regions.iter().filter(|r| r.contains_closed(p, REGION_TOL)).count();
            let strict = regions.iter().filter(|r| r.contains_strictly(p, 0.0)).count();
            closed == 0 || strict > 1
        })
        .count();
    Check::new("partition", bad == 0, format!("{bad} of {PARTITION_SAMPLES} samples uncovered or doubly covered"))
}

fn branch_check(f: &PiecewiseMap) -> Check {
    let worst = f
        .branches()
        .iter()
        .map(|m| {
            let [a, b, c, d] = m.coefficients();
            (a * d - b * c - 1.0).norm()
        })
        .fold(0.0, f64::max);
    Check::new("unimodular branches", worst <= 1e-9, format!("max |ad - bc - 1| = {worst:.3e}"))
}

/// The three stratum invariants: each arc of C_{n,t} lies in the closure of
/// the region named by the last letter of t, the branch of that letter maps
/// it into C_{n-1,s}, and the word maps it into the boundary.
pub fn strata_checks(f: &PiecewiseMap, strata: &Strata) -> Vec<Check> {
    let regions = f.partition().regions();
    let circles: Vec<Arc> = f.partition().boundary_circles().iter().map(Arc::full).collect();
    let (mut outside, mut forward, mut to_boundary, mut arcs) = (0usize, 0.0f64, 0.0f64, 0usize);
    for n in 1..=strata.depth() {
        let parent = &strata.shells()[..n];
        let shell = &strata.shells()[n];
        for (word, cell) in shell.cells() {
            let m = *word.last().expect("words at level n have n letters") as usize;
            let (s, branch) = (&word[..word.len() - 1], f.branch(m));
            let reversed: Vec<u8> = word.iter().rev().copied().collect();
            let to_bdry = f.compose_word(&reversed);
            for arc in cell {
                arcs += 1;
                for p in arc.interior_samples(ARC_SAMPLES) {
                    if !regions[m].contains_closed(p, REGION_TOL) {
                        outside += 1;
                    }
                    let q = branch.apply(p);
                    let d = parent_distance(parent, s, q);
                    forward = forward.max(d);
                    let e = circles.iter().map(|c| c.distance(to_bdry.apply(p))).fold(f64::INFINITY, f64::min);
                    to_boundary = to_boundary.max(e);
                }
            }
        }
    }
    vec![
        Check::new("strata in regions", outside == 0, format!("{outside} samples outside their region, {arcs} arcs")),
        Check::new("strata forward", forward <= FORWARD_TOL, format!("max distance to parent cell {forward:.3e}")),
        Check::new(
            "strata to boundary",
            to_boundary <= FORWARD_TOL,
            format!("max distance to boundary {to_boundary:.3e}"),
        ),
    ]
}

// Distance from q to the arcs of cell `s`, searched over every lower level
// because pieces already present below are not repeated.
fn parent_distance(shells: &[crate::prediscontinuity::ArcStratum], s: &[u8], q: SpherePoint) -> f64 {
    let mut best = f64::INFINITY;
    for shell in shells {
        let arcs = shell.cells().values().flatten();
        let points = shell.isolated().values().flatten();
        if shell.level() == s.len() {
            if let Some(cell) = shell.cells().get(s) {
                best = best.min(cell.iter().map(|a| a.distance(q)).fold(f64::INFINITY, f64::min));
            }
            if let Some(pts) = shell.isolated().get(s) {
                best = best.min(pts.iter().map(|&p| chordal(p, q)).fold(f64::INFINITY, f64::min));
            }
        } else if shell.level() < s.len() {
            best = best.min(arcs.map(|a| a.distance(q)).fold(f64::INFINITY, f64::min));
            best = best.min(points.map(|&p| chordal(p, q)).fold(f64::INFINITY, f64::min));
        }
    }
    best
}

// Prefix of F(z) equals the prefix of z shifted by one on clean pixels.
fn itinerary_check(scene: &SceneConfig) -> Result<Check> {
    let f = scene.map();
    let (w, h) = scene.resolution();
    let k = scene.prefix();
    let grid = raster_itineraries(f, scene.viewport(), w, h, k)?;
    let (mut bad, mut checked) = (0, 0);
    for j in 0..h {
        for i in 0..w {
            if grid.is_contaminated(i, j) {
                continue;
            }
            let z = grid.pixel_center(i, j);
            let long = f.itinerary(z, k + 1);
            let next = f.itinerary(f.eval(z), k);
            if long.touches_boundary() || next.touches_boundary() {
                continue;
            }
            checked += 1;
            if grid.prefix(grid.class(i, j)) != &long.symbols[..k] || long.symbols[1..] != next.symbols[..] {
                bad += 1;
            }
        }
    }
    Ok(Check::new("itinerary shift", bad == 0, format!("{bad} of {checked} clean pixels disagree")))
}

/// Black pixels against the strata, both ways, in pixel units: every black
/// pixel center is within one pixel of an arc sample and every sample in
/// the image is within one pixel of a black pixel center. Returns the two
/// worst distances.
pub fn overlay_soundness(
    strata: &Strata,
    viewport: &Viewport,
    w: usize,
    h: usize,
    black: &[(usize, usize)],
) -> (f64, f64) {
    let samples = pixel_samples(strata, strata.depth(), viewport, w, h);
    let arcs = Buckets::new(&samples);
    let centers: Vec<(f64, f64)> = black.iter().map(|&(i, j)| (i as f64 + 0.5, j as f64 + 0.5)).collect();
    let pixels = Buckets::new(&centers);
    let worst_black = centers.iter().map(|&c| arcs.nearest(c)).fold(0.0, f64::max);
    let worst_sample = samples.iter().filter(|&&s| in_image(s, w, h)).map(|&s| pixels.nearest(s)).fold(0.0, f64::max);
    (worst_black, worst_sample)
}

/// PD_n against a brute-force preimage grid, in pixel units.
///
/// Each vertex of a (w + 1) × (h + 1) lattice carries the first n + 1
/// symbols of its itinerary. An edge whose two ends disagree crosses
/// PD_n, and its midpoint stands for a brute-force PD_n point. Returns the
/// worst distance from such a midpoint to the arcs and from an arc sample
/// in the image to the nearest midpoint. Distances beyond three pixels are
/// reported as infinite.
pub fn preimage_grid_agreement(
    f: &PiecewiseMap,
    strata: &Strata,
    n: usize,
    viewport: &Viewport,
    w: usize,
    h: usize,
) -> (f64, f64) {
    assert!(n < 16, "at most 16 symbols are packed per vertex");
    let code = |i: usize, j: usize| -> u64 {
        let it = f.itinerary(viewport.point(i as f64, j as f64, w, h), n + 1);
        it.symbols.iter().fold(0u64, |acc, &s| (acc << 4) | s as u64)
    };
    let codes: Vec<u64> = (0..(w + 1) * (h + 1)).into_par_iter().map(|k| code(k % (w + 1), k / (w + 1))).collect();
    let at = |i: usize, j: usize| codes[j * (w + 1) + i];
    let mut crossings = Vec::new();
    for j in 0..=h {
        for i in 0..=w {
            if i < w && at(i, j) != at(i + 1, j) {
                crossings.push((i as f64 + 0.5, j as f64));
            }
            if j < h && at(i, j) != at(i, j + 1) {
                crossings.push((i as f64, j as f64 + 0.5));
            }
        }
    }
    let samples = pixel_samples(strata, n, viewport, w, h);
    let arcs = Buckets::new(&samples);
    let grid = Buckets::new(&crossings);
    let to_arcs = crossings.par_iter().map(|&c| arcs.nearest(c)).reduce(|| 0.0, f64::max);
    let to_grid = samples.par_iter().filter(|&&s| in_image(s, w, h)).map(|&s| grid.nearest(s)).reduce(|| 0.0, f64::max);
    (to_arcs, to_grid)
}

// Samples of PD_n in pixel coordinates, at most a quarter pixel apart near
// the image, plus the isolated points.
fn pixel_samples(strata: &Strata, n: usize, viewport: &Viewport, w: usize, h: usize) -> Vec<(f64, f64)> {
    let mut samples = Vec::new();
    for arc in strata.arcs_up_to(n) {
        let pieces = 64;
        let mut stack: Vec<(f64, f64)> =
            (0..pieces).map(|k| (k as f64 / pieces as f64, (k + 1) as f64 / pieces as f64)).collect();
        while let Some((t0, t1)) = stack.pop() {
            let (a, b) = (viewport.to_pixel(arc.point_at(t0), w, h), viewport.to_pixel(arc.point_at(t1), w, h));
            let short = matches!((a, b), (Some(a), Some(b)) if (a.0 - b.0).hypot(a.1 - b.1) <= 0.25);
            let far = matches!((a, b), (Some(a), Some(b)) if off_image(a, w, h) > 8.0 * (a.0 - b.0).hypot(a.1 - b.1) + 2.0
                && off_image(b, w, h) > 2.0);
            if short || far || t1 - t0 < 1e-12 {
                samples.extend(a);
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            stack.push((t0, tm));
            stack.push((tm, t1));
        }
    }
    for shell in strata.shells().iter().take(n + 1) {
        samples.extend(shell.isolated().values().flatten().filter_map(|&p| viewport.to_pixel(p, w, h)));
    }
    samples
}

// Points hashed by unit cell for nearest-point queries within three cells.
struct Buckets(HashMap<(i64, i64), Vec<(f64, f64)>>);

impl Buckets {
    fn new(points: &[(f64, f64)]) -> Self {
        let mut map: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
        for &p in points {
            map.entry((p.0.floor() as i64, p.1.floor() as i64)).or_default().push(p);
        }
        Buckets(map)
    }

    fn nearest(&self, c: (f64, f64)) -> f64 {
        let (ci, cj) = (c.0.floor() as i64, c.1.floor() as i64);
        let mut d = f64::INFINITY;
        for dj in -3..=3 {
            for di in -3..=3 {
                if let Some(v) = self.0.get(&(ci + di, cj + dj)) {
                    d = v.iter().map(|s| (s.0 - c.0).hypot(s.1 - c.1)).fold(d, f64::min);
                }
            }
        }
        if d > 3.0 {
            f64::INFINITY
        } else {
            d
        }
    }
}

fn in_image(p: (f64, f64), w: usize, h: usize) -> bool {
    p.0 >= 0.0 && p.1 >= 0.0 && p.0 < w as f64 && p.1 < h as f64
}

fn off_image(p: (f64, f64), w: usize, h: usize) -> f64 {
    let dx = (-p.0).max(p.0 - w as f64).max(0.0);
    let dy = (-p.1).max(p.1 - h as f64).max(0.0);
    dx.hypot(dy)
}

fn overlay_check(scene: &SceneConfig, strata: &Strata, image: &crate::render::Image) -> Check {
    let viewport = scene.viewport();
    if !matches!(viewport, Viewport::Rect { .. }) || !scene.toggles().pd_overlay {
        return Check {
            name: "overlay soundness",
            status: Status::Skip,
            detail: "needs a rectangular chart with the overlay on".into(),
        };
    }
    let (w, h) = scene.resolution();
    let black = overlay_pixels(strata, &viewport, w, h);
    let drawn = black.iter().all(|&(i, j)| image.get(i, j) == BLACK || image.get(i, j) == crate::render::RED);
    let (a, b) = overlay_soundness(strata, &viewport, w, h, &black);
    Check::new(
        "overlay soundness",
        drawn && a <= 1.0 && b <= 1.0,
        format!("black to arcs {a:.3} px, arcs to black {b:.3} px"),
    )
}

// Distinct visible prefixes that share a palette entry. With more visible
// prefixes than palette entries some must share, so this is a note.
fn color_check(scene: &SceneConfig) -> Result<Check> {
    let (w, h) = scene.resolution();
    let grid = raster_itineraries(scene.map(), scene.viewport(), w, h, scene.prefix())?;
    let colors = class_colors(&grid);
    let mut used: BTreeMap<[u8; 3], usize> = BTreeMap::new();
    for c in colors {
        *used.entry(c).or_default() += 1;
    }
    let shared: usize = used.values().filter(|&&n| n > 1).sum();
    let status = if shared == 0 { Status::Pass } else { Status::Note };
    Ok(Check {
        name: "color soundness",
        status,
        detail: format!("{} prefixes on {} colors, {shared} share a color", grid.class_count(), used.len()),
    })
}

impl From<Error> for Check {
    fn from(e: Error) -> Self {
        Check { name: "error", status: Status::Fail, detail: e.to_string() }
    }
}
