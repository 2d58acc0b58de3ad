use std::fmt;

use super::components::Components;
use super::grid::ItineraryGrid;
use crate::piecewise::{detect_periodicity, Periodicity, PiecewiseMap};
use crate::sphere::{Moebius, MoebiusKind, SpherePoint};

/// Itinerary length used to detect periodicity of a component.
pub const PERIOD_WINDOW: usize = 96;

/// Pixel tolerance for "the fixed point is on the component's boundary".
pub const BOUNDARY_PIXELS: isize = 2;

/// Most returns to an itinerary cell followed before a component is found to
/// come back to itself.
pub const MAX_LAPS: usize = 12;

/// The cases of the classification of periodic Fatou components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FatouCase {
    /// Loxodromic return map, attracting fixed point inside.
    Ia,
    /// Elliptic return map, fixed point inside.
    Ib,
    /// Identity return map (interior or boundary fixed points cannot be
    /// told apart).
    Identity,
    /// Loxodromic return map, attracting fixed point on the boundary.
    IIa,
    /// Parabolic return map, fixed point on the boundary.
    IIb,
    /// Elliptic return map without a fixed point in the component.
    III,
    /// The return map and fixed-point locations match no case.
    Inconsistent,
}

impl fmt::Display for FatouCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FatouCase::Ia => "ia",
            FatouCase::Ib => "ib",
            FatouCase::Identity => "identity",
            FatouCase::IIa => "iia",
            FatouCase::IIb => "iib",
            FatouCase::III => "iii",
            FatouCase::Inconsistent => "inconsistent",
        })
    }
}

/// Where a fixed point of the return map sits relative to the component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Placement {
    Inside,
    Boundary,
    Outside,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Inside => "inside",
            Placement::Boundary => "boundary",
            Placement::Outside => "outside",
        })
    }
}

/// A located fixed point of the return map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocatedFixedPoint {
    pub point: SpherePoint,
    pub placement: Placement,
    /// Decided from pixels (true) or, off the viewport, from the itinerary.
    pub by_pixels: bool,
}

/// Classification of one component.
#[derive(Clone, Debug, PartialEq)]
pub enum ComponentClass {
    /// No period was observed in the itinerary window.
    WanderingSuspect,
    Periodic(PeriodicClass),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicClass {
    /// Preperiod of the itinerary and period of the component, which is a
    /// multiple of the itinerary period.
    pub periodicity: Periodicity,
    /// Branch symbols of one cycle, starting at the periodic tail.
    pub cycle: Vec<u8>,
    pub return_map: Moebius,
    pub kind: MoebiusKind,
    pub fixed_points: Vec<LocatedFixedPoint>,
    pub case: FatouCase,
    /// The periodic component the representative falls into after the
    /// preperiod, when it is visible.
    pub target: Option<u32>,
    /// False when a location came from the itinerary fallback or a fixed
    /// point sits near the 2-pixel band.
    pub confident: bool,
}

impl ComponentClass {
    pub fn case(&self) -> Option<FatouCase> {
        match self {
            ComponentClass::Periodic(p) => Some(p.case),
            ComponentClass::WanderingSuspect => None,
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            ComponentClass::Periodic(p) => Some(p.periodicity.period),
            ComponentClass::WanderingSuspect => None,
        }
    }
}

/// Classifies a component by the return map along its itinerary cycle.
pub fn classify_component(f: &PiecewiseMap, grid: &ItineraryGrid, comps: &Components, id: u32) -> ComponentClass {
    let comp = comps.get(id).expect("component id in range");
    let itin = f.itinerary(comp.rep, PERIOD_WINDOW.max(4 * grid.prefix_len()));
    let Some(per) = detect_periodicity(&itin.symbols) else {
        return ComponentClass::WanderingSuspect;
    };
    let (p, q) = (per.preperiod, per.period);
    let cell_cycle = &itin.symbols[p..p + q];
    let start = f.orbit(comp.rep, p)[p];
    let target = if p == 0 { Some(id) } else { comps.at_point(grid, start) };
    let cell_map = f.compose_word(cell_cycle);
    let mut confident = true;
    // an itinerary cell may hold several components permuted by the cell's
    // return map; follow it until the representative comes home
    let mut laps = 1;
    if let Some(t) = target {
        let mut pt = cell_map.apply(start);
        while comps.at_point(grid, pt) != Some(t) && laps < MAX_LAPS {
            pt = cell_map.apply(pt);
            laps += 1;
        }
        if comps.at_point(grid, pt) != Some(t) {
            laps = 1;
            confident = false;
        }
    }
    let cycle = cell_cycle.repeat(laps);
    let return_map = cell_map.pow(laps as i32);
    let per = Periodicity { preperiod: p, period: q * laps };
    let cl = return_map.classify();
    let target_prefix: Vec<u8> = itin.symbols[p..p + grid.prefix_len()].to_vec();
    let fixed_points: Vec<LocatedFixedPoint> = cl
        .fixed_points
        .iter()
        .map(|fp| {
            let located = locate_fixed_point(f, grid, comps, target, &target_prefix, fp.point);
            confident &= located.by_pixels;
            located
        })
        .collect();
    let placement_of = |pt: SpherePoint| fixed_points.iter().find(|l| l.point == pt).map(|l| l.placement);
    let any = |pl: Placement| fixed_points.iter().any(|l| l.placement == pl);
    let case = match cl.kind {
        MoebiusKind::Identity => FatouCase::Identity,
        MoebiusKind::Elliptic => {
            if any(Placement::Inside) {
                FatouCase::Ib
            } else {
                FatouCase::III
            }
        }
        MoebiusKind::Hyperbolic | MoebiusKind::Loxodromic => match cl.attracting.and_then(placement_of) {
            Some(Placement::Inside) => FatouCase::Ia,
            Some(Placement::Boundary) => FatouCase::IIa,
            _ => FatouCase::Inconsistent,
        },
        MoebiusKind::Parabolic => match fixed_points.first().map(|l| l.placement) {
            Some(Placement::Boundary) => FatouCase::IIb,
            Some(Placement::Inside) => {
                confident = false;
                FatouCase::IIb
            }
            _ => FatouCase::Inconsistent,
        },
    };
    ComponentClass::Periodic(PeriodicClass {
        periodicity: per,
        cycle,
        return_map,
        kind: cl.kind,
        fixed_points,
        case,
        target,
        confident,
    })
}

fn locate_fixed_point(
    f: &PiecewiseMap,
    grid: &ItineraryGrid,
    comps: &Components,
    target: Option<u32>,
    target_prefix: &[u8],
    point: SpherePoint,
) -> LocatedFixedPoint {
    if let (Some(t), Some((x, y))) = (target, grid.viewport().to_pixel(point, grid.width(), grid.height())) {
        let (w, h) = (grid.width() as isize, grid.height() as isize);
        let (ci, cj) = (x.floor() as isize, y.floor() as isize);
        let in_image = ci >= 0 && ci < w && (grid.viewport().wraps() || (cj >= 0 && cj < h));
        if in_image {
            let mut hits = 0;
            let mut total = 0;
            for dj in -BOUNDARY_PIXELS..=BOUNDARY_PIXELS {
                for di in -BOUNDARY_PIXELS..=BOUNDARY_PIXELS {
                    let (i, j) = (ci + di, cj + dj);
                    let j = if grid.viewport().wraps() { j.rem_euclid(h) } else { j };
                    if i < 0 || j < 0 || i >= w || j >= h {
                        continue;
                    }
                    total += 1;
                    if comps.label(i as usize, j as usize) == t {
                        hits += 1;
                    }
                }
            }
            let placement = if hits == 0 {
                Placement::Outside
            } else if hits == total {
                Placement::Inside
            } else {
                Placement::Boundary
            };
            return LocatedFixedPoint { point, placement, by_pixels: true };
        }
    }
    // off the viewport: same itinerary prefix and no boundary contact
    let itin = f.itinerary(point, target_prefix.len());
    let placement =
        if !itin.touches_boundary() && itin.symbols == target_prefix { Placement::Inside } else { Placement::Outside };
    LocatedFixedPoint { point, placement, by_pixels: false }
}
