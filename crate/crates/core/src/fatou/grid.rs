use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::PiecewiseMap;
use crate::sphere::SpherePoint;

/// The chart that maps pixels to sphere points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Viewport {
    /// The rectangle `x[0] ≤ Re z ≤ x[1]`, `y[0] ≤ Im z ≤ y[1]`.
    Rect { x: [f64; 2], y: [f64; 2] },
    /// The square |Re w|, |Im w| ≤ `half_width` in the chart w = 1/z.
    Infinity { half_width: f64 },
    /// z = center + exp(u + iv) with `log_r[0] ≤ u ≤ log_r[1]` across and
    /// v ∈ [−π, π) down; the v direction wraps around.
    LogPolar { center: [f64; 2], log_r: [f64; 2] },
}

impl Viewport {
    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Viewport::Rect { x: [x0, x1], y: [y0, y1] }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Viewport::Rect { x, y } => x[0] < x[1] && y[0] < y[1] && x.iter().chain(&y).all(|v| v.is_finite()),
            Viewport::Infinity { half_width } => half_width > 0.0 && half_width.is_finite(),
            Viewport::LogPolar { center, log_r } => {
                log_r[0] < log_r[1] && center.iter().chain(&log_r).all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation("viewport", format!("{self:?} is empty or not finite")))
        }
    }

    /// Whether the vertical direction is periodic.
    pub fn wraps(&self) -> bool {
        matches!(self, Viewport::LogPolar { .. })
    }

    /// The sphere point at continuous pixel coordinates (pixel (i, j) has
    /// its center at (i + 0.5, j + 0.5)).
    pub fn point(&self, px: f64, py: f64, w: usize, h: usize) -> SpherePoint {
        let (fx, fy) = (px / w as f64, py / h as f64);
        match *self {
            Viewport::Rect { x, y } => SpherePoint::new(x[0] + fx * (x[1] - x[0]), y[1] - fy * (y[1] - y[0])),
            Viewport::Infinity { half_width: s } => {
                let wv = Complex64::new(-s + 2.0 * s * fx, s - 2.0 * s * fy);
                SpherePoint::from_homogeneous(Complex64::new(1.0, 0.0), wv)
            }
            Viewport::LogPolar { center, log_r } => {
                let u = log_r[0] + fx * (log_r[1] - log_r[0]);
                let v = PI - fy * TAU;
                SpherePoint::from(Complex64::new(center[0], center[1]) + Complex64::from_polar(u.exp(), v))
            }
        }
    }

    /// Continuous pixel coordinates of a point, if it lies in the chart's
    /// coordinate domain (it may still be outside the image).
    pub fn to_pixel(&self, p: SpherePoint, w: usize, h: usize) -> Option<(f64, f64)> {
        match *self {
            Viewport::Rect { x, y } => {
                let z = p.finite()?;
                Some(((z.re - x[0]) / (x[1] - x[0]) * w as f64, (y[1] - z.im) / (y[1] - y[0]) * h as f64))
            }
            Viewport::Infinity { half_width: s } => {
                let wv = match p {
                    SpherePoint::Infinity => Complex64::new(0.0, 0.0),
                    SpherePoint::Finite(z) if z.norm() > 0.0 => z.inv(),
                    SpherePoint::Finite(_) => return None,
                };
                Some(((wv.re + s) / (2.0 * s) * w as f64, (s - wv.im) / (2.0 * s) * h as f64))
            }
            Viewport::LogPolar { center, log_r } => {
                let d = p.finite()? - Complex64::new(center[0], center[1]);
                if d.norm() == 0.0 {
                    return None;
                }
                let u = d.norm().ln();
                let v = d.arg();
                Some(((u - log_r[0]) / (log_r[1] - log_r[0]) * w as f64, (PI - v) / TAU * h as f64))
            }
        }
    }

    /// The pixel containing a point, if inside the image.
    pub fn pixel_of(&self, p: SpherePoint, w: usize, h: usize) -> Option<(usize, usize)> {
        let (x, y) = self.to_pixel(p, w, h)?;
        let y = if self.wraps() { y.rem_euclid(h as f64) } else { y };
        if x >= 0.0 && y >= 0.0 && x < w as f64 && y < h as f64 {
            Some((x as usize, (y as usize).min(h - 1)))
        } else {
            None
        }
    }
}

/// Per-pixel itinerary prefixes over a viewport.
#[derive(Clone, Debug)]
pub struct ItineraryGrid {
    viewport: Viewport,
    width: usize,
    height: usize,
    prefix_len: usize,
    ids: Vec<u32>,
    prefixes: Vec<Vec<u8>>,
    table: HashMap<Vec<u8>, u32>,
    contaminated: Vec<bool>,
}

/// Rows computed per parallel batch.
const ROW_BATCH: usize = 64;

/// Computes the K-symbol itinerary prefix of every pixel center. Pixels
/// whose orbit comes within 1e-9 of the discontinuity set are flagged.
pub fn raster_itineraries(f: &PiecewiseMap, viewport: Viewport, w: usize, h: usize, k: usize) -> Result<ItineraryGrid> {
    viewport.validate()?;
    if w < 16 || h < 16 {
        return Err(Error::validation("resolution", format!("{w}x{h} is below 16x16")));
    }
    if k == 0 {
        return Err(Error::validation("prefix length", "K must be at least 1"));
    }
    let mut ids = Vec::with_capacity(w * h);
    let mut contaminated = Vec::with_capacity(w * h);
    let mut table: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut prefixes: Vec<Vec<u8>> = Vec::new();
    for batch in (0..h).step_by(ROW_BATCH) {
        let rows: Vec<(Vec<u8>, Vec<bool>)> = (batch..(batch + ROW_BATCH).min(h))
            .into_par_iter()
            .map(|j| {
                let mut symbols = Vec::with_capacity(w * k);
                let mut flags = Vec::with_capacity(w);
                for i in 0..w {
                    let mut q = viewport.point(i as f64 + 0.5, j as f64 + 0.5, w, h);
                    let mut dirty = false;
                    for _ in 0..k {
                        let loc = f.locate(q);
                        symbols.push(loc.region as u8);
                        dirty |= loc.on_boundary;
                        q = f.branch(loc.region).apply(q);
                    }
                    flags.push(dirty);
                }
                (symbols, flags)
            })
            .collect();
        for (symbols, flags) in rows {
            for (chunk, dirty) in symbols.chunks(k).zip(flags) {
                let id = match table.get(chunk) {
                    Some(&id) => id,
                    None => {
                        let id = prefixes.len() as u32;
                        table.insert(chunk.to_vec(), id);
                        prefixes.push(chunk.to_vec());
                        id
                    }
                };
                ids.push(id);
                contaminated.push(dirty);
            }
        }
    }
    Ok(ItineraryGrid { viewport, width: w, height: h, prefix_len: k, ids, prefixes, table, contaminated })
}

impl ItineraryGrid {
    pub fn viewport(&self) -> &Viewport {
        &self.viewport
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    /// Prefix class of pixel (i, j); equal classes have equal prefixes.
    pub fn class(&self, i: usize, j: usize) -> u32 {
        self.ids[j * self.width + i]
    }

    pub fn classes(&self) -> &[u32] {
        &self.ids
    }

    pub fn class_count(&self) -> usize {
        self.prefixes.len()
    }

    /// The exact prefix stored for a class.
    pub fn prefix(&self, class: u32) -> &[u8] {
        &self.prefixes[class as usize]
    }

    /// Class of a prefix, if any pixel has it.
    pub fn class_of_prefix(&self, prefix: &[u8]) -> Option<u32> {
        self.table.get(prefix).copied()
    }

    pub fn is_contaminated(&self, i: usize, j: usize) -> bool {
        self.contaminated[j * self.width + i]
    }

    pub fn contaminated(&self) -> &[bool] {
        &self.contaminated
    }

    /// The sphere point at the center of pixel (i, j).
    pub fn pixel_center(&self, i: usize, j: usize) -> SpherePoint {
        self.viewport.point(i as f64 + 0.5, j as f64 + 0.5, self.width, self.height)
    }

    pub fn pixel_of(&self, p: SpherePoint) -> Option<(usize, usize)> {
        self.viewport.pixel_of(p, self.width, self.height)
    }

    /// A stable 64-bit hash of a class's prefix (FNV-1a).
    pub fn prefix_hash(&self, class: u32) -> u64 {
        self.prefix(class).iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &s| (h ^ s as u64).wrapping_mul(0x100_0000_01b3))
    }
}
