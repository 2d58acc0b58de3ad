use super::grid::ItineraryGrid;
use crate::sphere::SpherePoint;

/// Label of pixels that belong to no reported component.
pub const NO_COMPONENT: u32 = u32::MAX;

/// Components smaller than this many pixels are discarded.
pub const MIN_COMPONENT_PIXELS: usize = 4;

/// A connected set of equal-prefix, uncontaminated pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub id: u32,
    pub class: u32,
    pub area: usize,
    /// The pixel deepest inside the component, and its center.
    pub rep_pixel: (usize, usize),
    pub rep: SpherePoint,
    /// Chessboard distance (pixels) from the representative to the
    /// component's outside.
    pub depth: u32,
    /// Whether the component reaches a non-periodic image edge.
    pub touches_edge: bool,
}

/// Labeled components of an itinerary grid.
#[derive(Clone, Debug)]
pub struct Components {
    width: usize,
    height: usize,
    wraps: bool,
    labels: Vec<u32>,
    list: Vec<Component>,
}

pub(crate) fn neighbors(i: usize, j: usize, w: usize, h: usize, wraps: bool) -> impl Iterator<Item = (usize, usize)> {
    let up = if j > 0 {
        Some((i, j - 1))
    } else if wraps {
        Some((i, h - 1))
    } else {
        None
    };
    let down = if j + 1 < h {
        Some((i, j + 1))
    } else if wraps {
        Some((i, 0))
    } else {
        None
    };
    let left = (i > 0).then(|| (i - 1, j));
    let right = (i + 1 < w).then(|| (i + 1, j));
    [left, right, up, down].into_iter().flatten()
}

/// Splits the grid into 4-connected components of equal prefix class,
/// skipping contaminated pixels and dropping components below 4 pixels.
pub fn components(grid: &ItineraryGrid) -> Components {
    let (w, h) = (grid.width(), grid.height());
    let wraps = grid.viewport().wraps();
    let mut raw = vec![NO_COMPONENT; w * h];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if raw[start] != NO_COMPONENT || grid.contaminated()[start] {
            continue;
        }
        let label = sizes.len() as u32;
        let class = grid.classes()[start];
        raw[start] = label;
        stack.push(start);
        let mut size = 0;
        while let Some(p) = stack.pop() {
            size += 1;
            for (ni, nj) in neighbors(p % w, p / w, w, h, wraps) {
                let q = nj * w + ni;
                if raw[q] == NO_COMPONENT && !grid.contaminated()[q] && grid.classes()[q] == class {
                    raw[q] = label;
                    stack.push(q);
                }
            }
        }
        sizes.push(size);
    }
    let mut remap = vec![NO_COMPONENT; sizes.len()];
    let mut next = 0;
    for (label, &size) in sizes.iter().enumerate() {
        if size >= MIN_COMPONENT_PIXELS {
            remap[label] = next;
            next += 1;
        }
    }
    let labels: Vec<u32> = raw.iter().map(|&l| if l == NO_COMPONENT { l } else { remap[l as usize] }).collect();
    let depth = chessboard_depth(&labels, w, h, wraps);
    let mut list: Vec<Component> = Vec::with_capacity(next as usize);
    for p in 0..w * h {
        let l = labels[p];
        if l == NO_COMPONENT {
            continue;
        }
        let (i, j) = (p % w, p / w);
        let edge = i == 0 || i + 1 == w || (!wraps && (j == 0 || j + 1 == h));
        if l as usize == list.len() {
            list.push(Component {
                id: l,
                class: grid.classes()[p],
                area: 0,
                rep_pixel: (i, j),
                rep: grid.pixel_center(i, j),
                depth: depth[p],
                touches_edge: false,
            });
        }
        let c = &mut list[l as usize];
        c.area += 1;
        c.touches_edge |= edge;
        if depth[p] > c.depth {
            c.depth = depth[p];
            c.rep_pixel = (i, j);
            c.rep = grid.pixel_center(i, j);
        }
    }
    Components { width: w, height: h, wraps, labels, list }
}

// Chessboard distance to the nearest pixel with a different label (pixels
// beyond a non-periodic edge count as different).
fn chessboard_depth(labels: &[u32], w: usize, h: usize, wraps: bool) -> Vec<u32> {
    let mut d = vec![u32::MAX / 2; w * h];
    let at = |i: isize, j: isize| -> Option<usize> {
        let j = if wraps { j.rem_euclid(h as isize) } else { j };
        (i >= 0 && j >= 0 && (i as usize) < w && (j as usize) < h).then(|| j as usize * w + i as usize)
    };
    for j in 0..h as isize {
        for i in 0..w as isize {
            let p = at(i, j).unwrap();
            let boundary = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .any(|&(di, dj)| at(i + di, j + dj).is_none_or(|q| labels[q] != labels[p]));
            if boundary {
                d[p] = 0;
            }
        }
    }
    let offsets_fwd = [(-1, -1), (0, -1), (1, -1), (-1, 0)];
    let offsets_bwd = [(1, 1), (0, 1), (-1, 1), (1, 0)];
    for j in 0..h as isize {
        for i in 0..w as isize {
            let p = at(i, j).unwrap();
            for &(di, dj) in &offsets_fwd {
                if let Some(q) = at(i + di, j + dj) {
                    d[p] = d[p].min(d[q] + 1);
                }
            }
        }
    }
    for j in (0..h as isize).rev() {
        for i in (0..w as isize).rev() {
            let p = at(i, j).unwrap();
            for &(di, dj) in &offsets_bwd {
                if let Some(q) = at(i + di, j + dj) {
                    d[p] = d[p].min(d[q] + 1);
                }
            }
        }
    }
    d
}

impl Components {
    pub fn list(&self) -> &[Component] {
        &self.list
    }

    pub fn get(&self, id: u32) -> Option<&Component> {
        self.list.get(id as usize)
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn label(&self, i: usize, j: usize) -> u32 {
        self.labels[j * self.width + i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn wraps(&self) -> bool {
        self.wraps
    }

    /// The component containing a point, if its pixel is labeled.
    pub fn at_point(&self, grid: &ItineraryGrid, p: SpherePoint) -> Option<u32> {
        let (i, j) = grid.pixel_of(p)?;
        let l = self.label(i, j);
        (l != NO_COMPONENT).then_some(l)
    }

    /// Pixels of one component, in scan order.
    pub fn pixels(&self, id: u32) -> Vec<(usize, usize)> {
        (0..self.width * self.height)
            .filter(|&p| self.labels[p] == id)
            .map(|p| (p % self.width, p / self.width))
            .collect()
    }
}
