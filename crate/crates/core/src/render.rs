//! Deterministic raster rendering: itinerary colors, the pre-discontinuity
//! overlay in black and periodic points in red, written as binary PPM.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fatou::{
    classify_component, components, connectivity, raster_itineraries, ComponentClass, Components, Connectivity,
    FatouCase, ItineraryGrid, Placement, Viewport, CONNECTIVITY_THRESHOLD,
};
use crate::piecewise::PiecewiseMap;
use crate::prediscontinuity::{pd_partial, Strata, DEFAULT_ARC_BUDGET};
use crate::scene::SceneConfig;
use crate::sphere::{Arc, SpherePoint};

pub const BLACK: [u8; 3] = [0, 0, 0];
pub const RED: [u8; 3] = [255, 0, 0];
/// Background when component coloring is off.
pub const PLAIN: [u8; 3] = [235, 235, 235];
pub const PALETTE_SIZE: usize = 64;

/// The fixed 64-color palette. Every channel lies in 64..=239, so neither
/// black nor red can occur.
pub fn palette() -> [[u8; 3]; PALETTE_SIZE] {
    let mut out = [[0; 3]; PALETTE_SIZE];
    for (i, c) in out.iter_mut().enumerate() {
        // splitmix64 of the index, one byte per channel
        let mut z = (i as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        for (k, ch) in c.iter_mut().enumerate() {
            *ch = 64 + ((z >> (8 * k)) & 0xff) as u8 % 176;
        }
    }
    out
}

/// An RGB raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        Image { width, height, data: fill.repeat(width * height) }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, i: usize, j: usize) -> [u8; 3] {
        let k = 3 * (j * self.width + i);
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    pub fn set(&mut self, i: usize, j: usize, c: [u8; 3]) {
        let k = 3 * (j * self.width + i);
        self.data[k..k + 3].copy_from_slice(&c);
    }

    /// Binary PPM: `P6`, the dimensions, 255, then RGB triplets row by row.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Parse { line: 0, column: 0, message: format!("ppm: {m}") };
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ascii"))?);
        }
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad("expected P6 with maxval 255"));
        }
        let width: usize = fields[1].parse().map_err(|_| bad("width"))?;
        let height: usize = fields[2].parse().map_err(|_| bad("height"))?;
        let data = bytes.get(pos + 1..).ok_or_else(|| bad("missing pixel data"))?.to_vec();
        if data.len() != 3 * width * height {
            return Err(bad("pixel data length"));
        }
        Ok(Image { width, height, data })
    }

    pub fn write_ppm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&self.to_ppm())?;
        f.flush()?;
        Ok(())
    }
}

/// One row of the component report.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentReport {
    pub id: u32,
    pub rep: SpherePoint,
    pub period: Option<usize>,
    pub case: Option<FatouCase>,
    /// `None` when the hole count could not be resolved.
    pub holes: Option<Connectivity>,
    pub area: usize,
}

/// Fixed-column component table: id, rep, period, case, holes, area.
pub struct ComponentTable<'a>(pub &'a [ComponentReport]);

impl fmt::Display for ComponentTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>15} {:>15} {:>7} {:>13} {:>6} {:>9}",
            "id", "rep_re", "rep_im", "period", "case", "holes", "area"
        )?;
        for r in self.0 {
            let (re, im) = match r.rep {
                SpherePoint::Finite(z) => (format!("{:.8}", z.re), format!("{:.8}", z.im)),
                SpherePoint::Infinity => ("inf".into(), "inf".into()),
            };
            let period = r.period.map_or("-".into(), |p| p.to_string());
            let case = r.case.map_or("wandering?".into(), |c| c.to_string());
            let holes = r.holes.map_or("?".into(), |c| c.to_string());
            writeln!(f, "{:>6} {:>15} {:>15} {:>7} {:>13} {:>6} {:>9}", r.id, re, im, period, case, holes, r.area)?;
        }
        Ok(())
    }
}

/// Classifies every component and counts its holes.
pub fn component_report(f: &PiecewiseMap, grid: &ItineraryGrid, comps: &Components) -> Vec<ComponentReport> {
    comps
        .list()
        .par_iter()
        .map(|c| {
            let class = classify_component(f, grid, comps, c.id);
            ComponentReport {
                id: c.id,
                rep: c.rep,
                period: class.period(),
                case: class.case(),
                holes: connectivity(grid, comps, c.id, None, CONNECTIVITY_THRESHOLD).ok(),
                area: c.area,
            }
        })
        .collect()
}

/// Palette entry of each prefix class. Classes are taken in order of
/// (prefix hash, prefix); each starts at its hash mod [`PALETTE_SIZE`] and
/// moves to the next free entry, so up to [`PALETTE_SIZE`] visible prefixes
/// get distinct colors. Once the palette is used up, classes keep their
/// hashed entry.
pub fn class_colors(grid: &ItineraryGrid) -> Vec<[u8; 3]> {
    let pal = palette();
    let n = grid.class_count();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| (grid.prefix_hash(a), grid.prefix(a)).cmp(&(grid.prefix_hash(b), grid.prefix(b))));
    let mut used = [false; PALETTE_SIZE];
    let mut free = PALETTE_SIZE;
    let mut out = vec![PLAIN; n];
    for c in order {
        let mut slot = (grid.prefix_hash(c) % PALETTE_SIZE as u64) as usize;
        if free > 0 {
            while used[slot] {
                slot = (slot + 1) % PALETTE_SIZE;
            }
            used[slot] = true;
            free -= 1;
        }
        out[c as usize] = pal[slot];
    }
    out
}

/// Everything produced by a render.
#[derive(Clone, Debug)]
pub struct Rendered {
    pub image: Image,
    pub components: Vec<ComponentReport>,
    pub markers: Vec<SpherePoint>,
    pub levels: usize,
    pub arcs: usize,
    /// Set when the strata hit the arc budget; the overlay then shows the
    /// levels completed before the cut.
    pub truncated: Option<Error>,
}

/// Renders a scene with the default arc budget.
pub fn render(scene: &SceneConfig) -> Result<Rendered> {
    render_with_budget(scene, DEFAULT_ARC_BUDGET)
}

/// Renders a scene, stopping the overlay at the first stratum that would
/// exceed `budget` arcs.
pub fn render_with_budget(scene: &SceneConfig, budget: usize) -> Result<Rendered> {
    let f = scene.map();
    let (w, h) = scene.resolution();
    let viewport = scene.viewport();
    let toggles = scene.toggles();
    let grid = raster_itineraries(f, viewport, w, h, scene.prefix())?;
    let comps = components(&grid);
    let mut image = Image::new(w, h, PLAIN);
    if toggles.component_coloring {
        let colors = class_colors(&grid);
        for (k, &c) in grid.classes().iter().enumerate() {
            image.set(k % w, k / w, colors[c as usize]);
        }
    }
    let (mut levels, mut arcs, mut truncated) = (0, 0, None);
    if toggles.pd_overlay {
        let (strata, err) = pd_partial(f, scene.depth(), budget);
        levels = strata.depth();
        arcs = strata.arc_count();
        truncated = err;
        for (i, j) in overlay_pixels(&strata, &viewport, w, h) {
            image.set(i, j, BLACK);
        }
    }
    let report = component_report(f, &grid, &comps);
    let mut markers = Vec::new();
    if toggles.periodic_markers {
        markers = periodic_points(f, &grid, &comps);
        for p in &markers {
            if let Some((i, j)) = grid.pixel_of(*p) {
                for dj in -1isize..=1 {
                    for di in -1isize..=1 {
                        let (x, y) = (i as isize + di, j as isize + dj);
                        let y = if viewport.wraps() { y.rem_euclid(h as isize) } else { y };
                        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                            image.set(x as usize, y as usize, RED);
                        }
                    }
                }
            }
        }
    }
    Ok(Rendered { image, components: report, markers, levels, arcs, truncated })
}

/// Fixed points of the return maps lying in or on their components, with
/// their cycles.
pub fn periodic_points(f: &PiecewiseMap, grid: &ItineraryGrid, comps: &Components) -> Vec<SpherePoint> {
    let found: Vec<Vec<SpherePoint>> = comps
        .list()
        .par_iter()
        .map(|c| match classify_component(f, grid, comps, c.id) {
            ComponentClass::Periodic(p) => p
                .fixed_points
                .iter()
                .filter(|l| l.placement != Placement::Outside)
                .flat_map(|l| f.orbit(l.point, p.periodicity.period - 1))
                .collect(),
            ComponentClass::WanderingSuspect => Vec::new(),
        })
        .collect();
    let mut pixels = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for p in found.into_iter().flatten() {
        if let Some(px) = grid.pixel_of(p) {
            if pixels.insert(px) {
                out.push(p);
            }
        }
    }
    out
}

/// Pixels crossed by the arcs and isolated points of the strata. Samples
/// along each arc are at most half a pixel apart.
pub fn overlay_pixels(strata: &Strata, viewport: &Viewport, w: usize, h: usize) -> Vec<(usize, usize)> {
    let arcs: Vec<&Arc> = strata.arcs_up_to(strata.depth()).collect();
    let mut px: Vec<(usize, usize)> = arcs.par_iter().flat_map_iter(|a| arc_pixels(a, viewport, w, h)).collect();
    for shell in strata.shells() {
        px.extend(shell.isolated().values().flatten().filter_map(|&p| viewport.pixel_of(p, w, h)));
    }
    px.sort_unstable();
    px.dedup();
    px
}

const MAX_SUBDIVISION: u32 = 40;

/// Pixels along one arc, by recursive bisection of its parameter range.
pub fn arc_pixels(arc: &Arc, viewport: &Viewport, w: usize, h: usize) -> Vec<(usize, usize)> {
    let raster = Raster { viewport, w, h };
    let mut out = Vec::new();
    let n = 64;
    let ts: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let pos: Vec<Option<(f64, f64)>> = ts.iter().map(|&t| raster.at(arc, t)).collect();
    for k in 0..n {
        raster.bisect(arc, ts[k], ts[k + 1], pos[k], pos[k + 1], 0, &mut out);
    }
    out
}

struct Raster<'a> {
    viewport: &'a Viewport,
    w: usize,
    h: usize,
}

impl Raster<'_> {
    fn at(&self, arc: &Arc, t: f64) -> Option<(f64, f64)> {
        self.viewport.to_pixel(arc.point_at(t), self.w, self.h)
    }

    fn dist(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let mut dy = (a.1 - b.1).abs();
        if self.viewport.wraps() {
            dy = dy.min(self.h as f64 - dy);
        }
        (a.0 - b.0).hypot(dy)
    }

    fn plot(&self, p: (f64, f64), out: &mut Vec<(usize, usize)>) {
        let y = if self.viewport.wraps() { p.1.rem_euclid(self.h as f64) } else { p.1 };
        if p.0 >= 0.0 && y >= 0.0 && p.0 < self.w as f64 && y < self.h as f64 {
            out.push((p.0 as usize, (y as usize).min(self.h - 1)));
        }
    }

    // distance from a point to the image rectangle, in pixels
    fn outside_by(&self, p: (f64, f64)) -> f64 {
        let dx = (-p.0).max(p.0 - self.w as f64).max(0.0);
        let dy = (-p.1).max(p.1 - self.h as f64).max(0.0);
        dx.hypot(dy)
    }

    #[allow(clippy::too_many_arguments)]
    fn bisect(
        &self,
        arc: &Arc,
        t0: f64,
        t1: f64,
        p0: Option<(f64, f64)>,
        p1: Option<(f64, f64)>,
        depth: u32,
        out: &mut Vec<(usize, usize)>,
    ) {
        let tm = 0.5 * (t0 + t1);
        let pm = self.at(arc, tm);
        if let (Some(a), Some(m), Some(b)) = (p0, pm, p1) {
            let chord = self.dist(a, b);
            if chord <= 0.5 && self.dist(a, m) <= 0.5 {
                self.plot(a, out);
                self.plot(m, out);
                self.plot(b, out);
                return;
            }
            // Rect and ∞ charts are Möbius images of the plane, so a piece
            // whose midpoint sags at most half the chord is a minor arc and
            // stays in the disc on the chord
            if !self.viewport.wraps() {
                let c = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
                if self.dist(m, c) <= 0.5 * chord && self.outside_by(c) > 0.5 * chord + 1.0 {
                    return;
                }
            }
        }
        if depth >= MAX_SUBDIVISION {
            for p in [p0, pm, p1].into_iter().flatten() {
                self.plot(p, out);
            }
            return;
        }
        self.bisect(arc, t0, tm, p0, pm, depth + 1, out);
        self.bisect(arc, tm, t1, pm, p1, depth + 1, out);
    }
}

/// Caps the global thread pool at `PCM_THREADS` when set. Returns the
/// number of threads in use.
pub fn configure_threads() -> Result<usize> {
    if let Ok(v) = std::env::var("PCM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::validation("PCM_THREADS", format!("{v:?} is not a positive integer")))?;
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_avoids_reserved_colors() {
        let p = palette();
        assert!(p.iter().all(|c| *c != RED && *c != BLACK));
        let distinct: std::collections::BTreeSet<_> = p.iter().collect();
        assert_eq!(distinct.len(), PALETTE_SIZE);
    }

    #[test]
    fn one_region_scene_is_uniform() {
        let scene = SceneConfig::parse(
            r#"{"name": "one", "regions": [{"constraints": [], "map": {"a": [1, 0], "b": [0, 0], "c": [0, 0], "d": [1, 0]}}],
                "viewport": {"kind": "rect", "x": [-1, 1], "y": [-1, 1]}, "resolution": [16, 16], "prefix": 4, "depth": 3}"#,
        )
        .unwrap();
        let r = render(&scene).unwrap();
        let first = r.image.get(0, 0);
        assert_ne!(first, BLACK);
        for j in 0..16 {
            for i in 0..16 {
                assert_eq!(r.image.get(i, j), first);
            }
        }
        assert_eq!(r.arcs, 0);
        assert_eq!(r.components.len(), 1);
    }

    #[test]
    fn ppm_round_trip() {
        let mut img = Image::new(3, 2, PLAIN);
        img.set(2, 1, RED);
        let bytes = img.to_ppm();
        assert!(bytes.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 18);
        assert_eq!(Image::from_ppm(&bytes).unwrap(), img);
    }
}
