use std::fmt;

use super::components::{Components, MIN_COMPONENT_PIXELS};
use super::grid::{ItineraryGrid, Viewport};
use crate::error::{Error, Result};

/// Default count from which connectivity is reported as unbounded.
pub const CONNECTIVITY_THRESHOLD: usize = 20;

/// Number of complementary components of a Fatou component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Exact(usize),
    AtLeast(usize),
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connectivity::Exact(n) => write!(f, "{n}"),
            Connectivity::AtLeast(n) => write!(f, "≥ {n}"),
        }
    }
}

/// Share of a class group's border that must belong to the component for
/// the group to count as a hole when it is not fully enclosed.
pub const ENCLOSURE_SHARE: f64 = 0.9;

/// Holes of a component, scanned over its bounding box grown by one pixel
/// (the whole image when `count_edge` is set or the chart wraps).
///
/// The complement is split into 8-connected pieces. A piece that reaches
/// neither the box border nor the image edge is enclosed; it contributes one
/// hole per class group touching the component, so tangent discs stay
/// separate. In a piece that reaches the outside, a class group touching
/// the component counts when it stays off the border and at least
/// [`ENCLOSURE_SHARE`] of its border pixels belong to the component.
fn holes(grid: &ItineraryGrid, comps: &Components, id: u32, count_edge: bool) -> usize {
    let (w, h, wraps) = (comps.width(), comps.height(), comps.wraps());
    let labels = comps.labels();
    let (mut i0, mut i1, mut j0, mut j1) = (0, w - 1, 0, h - 1);
    if !count_edge && !wraps {
        let px = comps.pixels(id);
        i0 = px.iter().map(|p| p.0).min().unwrap_or(0).saturating_sub(1);
        i1 = (px.iter().map(|p| p.0).max().unwrap_or(0) + 1).min(w - 1);
        j0 = px.iter().map(|p| p.1).min().unwrap_or(0).saturating_sub(1);
        j1 = (px.iter().map(|p| p.1).max().unwrap_or(0) + 1).min(h - 1);
    }
    let ww = i1 - i0 + 1;
    let periodic = wraps && j0 == 0 && j1 == h - 1;
    let win = |i: usize, j: usize| (j - j0) * ww + (i - i0);
    let border = |i: usize, j: usize| !count_edge && (i == i0 || i == i1 || (!periodic && (j == j0 || j == j1)));
    let step = |i: usize, j: usize, di: isize, dj: isize| -> Option<(usize, usize)> {
        let (ni, nj) = (i as isize + di, j as isize + dj);
        if ni < i0 as isize || ni > i1 as isize {
            return None;
        }
        let nj = if periodic {
            nj.rem_euclid(h as isize)
        } else if nj < j0 as isize || nj > j1 as isize {
            return None;
        } else {
            nj
        };
        Some((ni as usize, nj as usize))
    };
    let outside = |i: usize, j: usize| labels[j * w + i] != id;

    // 8-connected pieces of the complement
    let mut piece = vec![u32::MAX; ww * (j1 - j0 + 1)];
    let mut enclosed = Vec::new();
    let mut stack = Vec::new();
    for sj in j0..=j1 {
        for si in i0..=i1 {
            if piece[win(si, sj)] != u32::MAX || !outside(si, sj) {
                continue;
            }
            let k = enclosed.len() as u32;
            piece[win(si, sj)] = k;
            stack.push((si, sj));
            let (mut size, mut open) = (0, false);
            while let Some((i, j)) = stack.pop() {
                size += 1;
                open |= border(i, j);
                for (di, dj) in [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
                    if let Some((ni, nj)) = step(i, j, di, dj) {
                        if piece[win(ni, nj)] == u32::MAX && outside(ni, nj) {
                            piece[win(ni, nj)] = k;
                            stack.push((ni, nj));
                        }
                    }
                }
            }
            enclosed.push((!open).then_some(size));
        }
    }

    // 4-connected class groups inside the complement
    let mut groups_in = vec![0usize; enclosed.len()];
    let mut open_holes = 0;
    let mut seen = vec![false; ww * (j1 - j0 + 1)];
    for sj in j0..=j1 {
        for si in i0..=i1 {
            let s = win(si, sj);
            if seen[s] || !outside(si, sj) || grid.is_contaminated(si, sj) {
                continue;
            }
            let class = grid.class(si, sj);
            seen[s] = true;
            stack.push((si, sj));
            let (mut size, mut on_border, mut own, mut foreign) = (0, false, 0usize, 0usize);
            while let Some((i, j)) = stack.pop() {
                size += 1;
                on_border |= border(i, j);
                for (di, dj) in [(0, -1), (-1, 0), (1, 0), (0, 1)] {
                    let Some((ni, nj)) = step(i, j, di, dj) else { continue };
                    if !outside(ni, nj) {
                        own += 1;
                    } else if grid.is_contaminated(ni, nj) {
                        continue;
                    } else if grid.class(ni, nj) != class {
                        foreign += 1;
                    } else if !seen[win(ni, nj)] {
                        seen[win(ni, nj)] = true;
                        stack.push((ni, nj));
                    }
                }
            }
            if own == 0 || size < MIN_COMPONENT_PIXELS {
                continue;
            }
            let k = piece[s] as usize;
            if enclosed[k].is_some() {
                groups_in[k] += 1;
            } else if !on_border && own as f64 >= ENCLOSURE_SHARE * (own + foreign) as f64 {
                open_holes += 1;
            }
        }
    }
    let closed_holes: usize = enclosed
        .iter()
        .zip(&groups_in)
        .filter_map(|(e, &g)| e.filter(|&size| size >= MIN_COMPONENT_PIXELS).map(|_| g.max(1)))
        .sum();
    closed_holes + open_holes
}

/// Connectivity of a component, optionally resolved at ∞ with a second
/// grid in the chart w = 1/z.
///
/// A component that stays inside a rectangular viewport has connectivity
/// holes + 1. One that reaches the edge is exact only when `outer` shows
/// that everything beyond the viewport carries the component's prefix;
/// otherwise the hole count is a lower bound. Counts at or above
/// `threshold` are reported as `AtLeast(threshold)`.
pub fn connectivity(
    grid: &ItineraryGrid,
    comps: &Components,
    id: u32,
    outer: Option<&ItineraryGrid>,
    threshold: usize,
) -> Result<Connectivity> {
    let comp = comps.get(id).ok_or(Error::validation("component", format!("no component {id}")))?;
    let cap = |c: Connectivity| match c {
        Connectivity::Exact(n) | Connectivity::AtLeast(n) if n >= threshold => Connectivity::AtLeast(threshold),
        c => c,
    };
    let rect = matches!(grid.viewport(), Viewport::Rect { .. });
    if rect && !comp.touches_edge {
        return Ok(cap(Connectivity::Exact(holes(grid, comps, id, false) + 1)));
    }
    if rect {
        if let Some(o) = outer {
            if exterior_is_component(grid, o, grid.prefix(comp.class)) {
                return Ok(cap(Connectivity::Exact(holes(grid, comps, id, true))));
            }
        }
    }
    match holes(grid, comps, id, false) {
        0 => Err(Error::Unresolved),
        n => Ok(cap(Connectivity::AtLeast(n))),
    }
}

// Every pixel of the ∞-chart grid lying outside the main viewport carries
// the prefix and no boundary contact.
fn exterior_is_component(grid: &ItineraryGrid, outer: &ItineraryGrid, prefix: &[u8]) -> bool {
    if outer.prefix_len() != grid.prefix_len() {
        return false;
    }
    let Some(class) = outer.class_of_prefix(prefix) else {
        return false;
    };
    let mut exterior = 0;
    for j in 0..outer.height() {
        for i in 0..outer.width() {
            let p = outer.pixel_center(i, j);
            if grid.pixel_of(p).is_some() {
                continue;
            }
            exterior += 1;
            if outer.is_contaminated(i, j) || outer.class(i, j) != class {
                return false;
            }
        }
    }
    exterior > 0
}
