//! Fatou components as itinerary cells on a raster: detection, return-map
//! classification and connectivity.

mod classify;
mod components;
mod connectivity;
mod grid;

pub use classify::{
    classify_component, ComponentClass, FatouCase, LocatedFixedPoint, PeriodicClass, Placement, BOUNDARY_PIXELS,
    MAX_LAPS, PERIOD_WINDOW,
};
pub use components::{components, Component, Components, MIN_COMPONENT_PIXELS, NO_COMPONENT};
pub use connectivity::{connectivity, Connectivity, CONNECTIVITY_THRESHOLD, ENCLOSURE_SHARE};
pub use grid::{raster_itineraries, ItineraryGrid, Viewport};

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::gallery::gallery;
    use crate::piecewise::{Partition, PiecewiseMap, Region};
    use crate::scene::SceneConfig;
    use crate::sphere::{Moebius, SpherePoint};

    fn scene(name: &str, res: usize) -> SceneConfig {
        gallery(name).unwrap().with_settings(Some((res, res)), None, None).unwrap()
    }

    fn grid_of(s: &SceneConfig, k: usize) -> ItineraryGrid {
        let (w, h) = s.resolution();
        raster_itineraries(s.map(), s.viewport(), w, h, k).unwrap()
    }

    fn marked(s: &SceneConfig, grid: &ItineraryGrid, comps: &Components, label: &str) -> u32 {
        comps.at_point(grid, s.marker(label).unwrap()).unwrap()
    }

    #[test]
    fn one_symbol_is_region_membership() {
        let s = scene("fig_rot", 64);
        let grid = grid_of(&s, 1);
        for j in 0..64 {
            for i in 0..64 {
                let region = s.map().locate(grid.pixel_center(i, j)).region as u8;
                assert_eq!(grid.prefix(grid.class(i, j)), &[region]);
            }
        }
    }

    #[test]
    fn unbounded_zone_of_itin_scene_stays_outside() {
        let s = scene("fig_itin", 128);
        let grid = grid_of(&s, 12);
        for (i, j) in [(0, 0), (127, 0), (0, 127), (127, 127)] {
            assert_eq!(grid.prefix(grid.class(i, j)), &[1u8; 12]);
        }
    }

    #[test]
    fn prefixes_are_stored_exactly() {
        let s = scene("fig_attr", 128);
        let grid = grid_of(&s, 12);
        for j in (0..128).step_by(7) {
            for i in (0..128).step_by(5) {
                let expected = s.map().itinerary(grid.pixel_center(i, j), 12).symbols;
                assert_eq!(grid.prefix(grid.class(i, j)), expected.as_slice());
            }
        }
        let distinct: std::collections::HashSet<&[u8]> =
            (0..grid.class_count() as u32).map(|c| grid.prefix(c)).collect();
        assert_eq!(distinct.len(), grid.class_count());
    }

    #[test]
    fn single_region_gives_one_component() {
        let f =
            PiecewiseMap::new(Partition::new(vec![Region::everything()]).unwrap(), vec![Moebius::identity()]).unwrap();
        let grid = raster_itineraries(&f, Viewport::rect(-1.0, 1.0, -1.0, 1.0), 32, 32, 8).unwrap();
        let comps = components(&grid);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps.list()[0].area, 32 * 32);
    }

    #[test]
    fn components_share_one_prefix() {
        let s = scene("fig_rotext", 192);
        let grid = grid_of(&s, 24);
        let comps = components(&grid);
        for j in 0..192 {
            for i in 0..192 {
                let l = comps.label(i, j);
                if l != NO_COMPONENT {
                    assert_eq!(grid.class(i, j), comps.get(l).unwrap().class);
                    assert!(!grid.is_contaminated(i, j));
                }
            }
        }
    }

    #[test]
    fn wandering_squares_are_distinct_components() {
        let s = scene("fig_wander", 240).with_viewport(Viewport::rect(0.0, 4.0, 0.0, 4.0)).unwrap();
        let grid = grid_of(&s, 24);
        let comps = components(&grid);
        let mut ids = std::collections::BTreeSet::new();
        for a in 0..4 {
            for b in 0..4 {
                let id = comps.at_point(&grid, SpherePoint::new(a as f64 + 0.5, b as f64 + 0.5)).unwrap();
                // the whole open square is one component
                let corner = SpherePoint::new(a as f64 + 0.05, b as f64 + 0.95);
                assert_eq!(comps.at_point(&grid, corner), Some(id));
                ids.insert(id);
            }
        }
        assert_eq!(ids.len(), 16);
    }

    #[test]
    fn neutral_domain_cycles_through_six_components() {
        let s = scene("fig_rotneutr", 512);
        let grid = grid_of(&s, 24);
        let comps = components(&grid);
        let u = marked(&s, &grid, &comps, "U");
        let orbit = s.map().orbit(comps.get(u).unwrap().rep, 6);
        let ids: Vec<u32> = orbit.iter().map(|&p| comps.at_point(&grid, p).unwrap()).collect();
        let distinct: std::collections::BTreeSet<u32> = ids[..6].iter().copied().collect();
        assert_eq!(distinct.len(), 6);
        assert_eq!(ids[6], u);
    }

    #[test]
    fn case_examples() {
        for (name, case) in [("fig_attr", FatouCase::Ia), ("fig_parab", FatouCase::IIb), ("fig_rotann", FatouCase::III)]
        {
            let s = scene(name, 512);
            let grid = grid_of(&s, 24);
            let comps = components(&grid);
            let u = marked(&s, &grid, &comps, "U");
            assert_eq!(classify_component(s.map(), &grid, &comps, u).case(), Some(case), "{name}");
        }
    }

    #[test]
    fn attracting_return_map_pulls_pixels_to_its_fixed_point() {
        let s = scene("fig_attr", 256);
        let grid = grid_of(&s, 24);
        let comps = components(&grid);
        let u = marked(&s, &grid, &comps, "U");
        let ComponentClass::Periodic(p) = classify_component(s.map(), &grid, &comps, u) else { panic!() };
        assert_eq!(p.case, FatouCase::Ia);
        let attractor = p.return_map.classify().attracting.unwrap();
        let pixels = comps.pixels(u);
        for k in (0..pixels.len()).step_by((pixels.len() / 50).max(1)).take(50) {
            let (i, j) = pixels[k];
            let mut z = grid.pixel_center(i, j);
            for _ in 0..5000 {
                z = p.return_map.apply(z);
            }
            assert!(crate::sphere::chordal(z, attractor) < 1e-6);
        }
    }

    #[test]
    fn periodic_representatives_return_home() {
        let s = scene("fig_rot", 256);
        let grid = grid_of(&s, 24);
        let comps = components(&grid);
        for c in comps.list().iter().filter(|c| c.area >= 100) {
            if let ComponentClass::Periodic(p) = classify_component(s.map(), &grid, &comps, c.id) {
                if p.periodicity.preperiod == 0 && p.confident {
                    let back = s.map().orbit(c.rep, p.periodicity.period)[p.periodicity.period];
                    assert_eq!(comps.at_point(&grid, back), Some(c.id), "component {}", c.id);
                }
            }
        }
    }

    #[test]
    fn disc_component_is_simply_connected() {
        let s = scene("fig_conn_left", 256);
        let grid = grid_of(&s, 24);
        let comps = components(&grid);
        let disc = comps.at_point(&grid, SpherePoint::Finite(Complex64::new(1.5, 0.0))).unwrap();
        assert_eq!(connectivity(&grid, &comps, disc, None, CONNECTIVITY_THRESHOLD), Ok(Connectivity::Exact(1)));
    }

    #[test]
    fn edge_component_without_outer_chart_is_a_lower_bound() {
        let s = scene("fig_conn_left", 256);
        let grid = grid_of(&s, 24);
        let comps = components(&grid);
        let outer = marked(&s, &grid, &comps, "outer");
        assert_eq!(connectivity(&grid, &comps, outer, None, CONNECTIVITY_THRESHOLD), Ok(Connectivity::AtLeast(4)));
        assert_eq!(connectivity(&grid, &comps, outer, None, 3), Ok(Connectivity::AtLeast(3)));
    }
}
