//! Nearest-neighbor queries in the chordal metric.
//!
//! Chordal distance is euclidean distance between the images on the unit
//! sphere in R³, so a static 3-d tree over those images answers exact
//! nearest-point queries.

use rayon::prelude::*;

use crate::sphere::SpherePoint;

const LEAF: usize = 8;

/// A static 3-d tree over sphere points.
#[derive(Clone, Debug)]
pub struct PointIndex {
    coords: Vec<[f64; 3]>,
    ids: Vec<usize>,
}

impl PointIndex {
    pub fn new(points: &[SpherePoint]) -> Self {
        let mut items: Vec<([f64; 3], usize)> =
            points.iter().enumerate().map(|(i, p)| (p.to_unit_vector(), i)).collect();
        build(&mut items, 0);
        let (coords, ids) = items.into_iter().unzip();
        PointIndex { coords, ids }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Chordal distance to the nearest point and its index in the input
    /// slice, or `None` for an empty index.
    pub fn nearest(&self, p: SpherePoint) -> Option<(f64, usize)> {
        if self.coords.is_empty() {
            return None;
        }
        let q = p.to_unit_vector();
        let mut best = (f64::INFINITY, 0);
        self.search(&q, 0, self.coords.len(), 0, &mut best);
        Some((best.0.sqrt(), self.ids[best.1]))
    }

    /// Chordal distance to the nearest point (∞ for an empty index).
    pub fn distance(&self, p: SpherePoint) -> f64 {
        self.nearest(p).map_or(f64::INFINITY, |(d, _)| d)
    }

    /// Largest distance from any of `points` to the indexed set: the directed
    /// Hausdorff distance from `points` (0 when `points` is empty).
    pub fn max_distance(&self, points: &[SpherePoint]) -> f64 {
        points.par_iter().map(|&p| self.distance(p)).reduce(|| 0.0, f64::max)
    }

    /// Indices of all points within chordal distance `r`.
    pub fn within(&self, p: SpherePoint, r: f64) -> Vec<usize> {
        let q = p.to_unit_vector();
        let mut out = Vec::new();
        self.collect(&q, r * r, 0, self.coords.len(), 0, &mut out);
        out.sort_unstable();
        out
    }

    fn search(&self, q: &[f64; 3], lo: usize, hi: usize, depth: usize, best: &mut (f64, usize)) {
        if hi - lo <= LEAF {
            for i in lo..hi {
                let d = dist2(&self.coords[i], q);
                if d < best.0 {
                    *best = (d, i);
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = depth % 3;
        let d = dist2(&self.coords[mid], q);
        if d < best.0 {
            *best = (d, mid);
        }
        let delta = q[axis] - self.coords[mid][axis];
        let (near, far) = if delta < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(q, near.0, near.1, depth + 1, best);
        if delta * delta < best.0 {
            self.search(q, far.0, far.1, depth + 1, best);
        }
    }

    fn collect(&self, q: &[f64; 3], r2: f64, lo: usize, hi: usize, depth: usize, out: &mut Vec<usize>) {
        if hi - lo <= LEAF {
            out.extend((lo..hi).filter(|&i| dist2(&self.coords[i], q) <= r2).map(|i| self.ids[i]));
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = depth % 3;
        if dist2(&self.coords[mid], q) <= r2 {
            out.push(self.ids[mid]);
        }
        let delta = q[axis] - self.coords[mid][axis];
        if delta < 0.0 || delta * delta <= r2 {
            self.collect(q, r2, lo, mid, depth + 1, out);
        }
        if delta >= 0.0 || delta * delta <= r2 {
            self.collect(q, r2, mid + 1, hi, depth + 1, out);
        }
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn build(items: &mut [([f64; 3], usize)], depth: usize) {
    if items.len() <= LEAF {
        return;
    }
    let axis = depth % 3;
    let mid = items.len() / 2;
    items.select_nth_unstable_by(mid, |x, y| x.0[axis].total_cmp(&y.0[axis]));
    let (left, rest) = items.split_at_mut(mid);
    build(left, depth + 1);
    build(&mut rest[1..], depth + 1);
}

/// Removes points within `eps` (chordally) of an earlier kept point.
pub fn dedup_points(points: Vec<SpherePoint>, eps: f64) -> Vec<SpherePoint> {
    if points.len() < 2 {
        return points;
    }
    let index = PointIndex::new(&points);
    let mut removed = vec![false; points.len()];
    let mut out = Vec::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        if removed[i] {
            continue;
        }
        out.push(p);
        for j in index.within(p, eps) {
            if j > i {
                removed[j] = true;
            }
        }
    }
    out
}
