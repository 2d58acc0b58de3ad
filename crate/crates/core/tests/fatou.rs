use pcm::fatou::{
    classify_component, components, raster_itineraries, ComponentClass, Components, FatouCase, ItineraryGrid,
};
use pcm::gallery::gallery;
use pcm::scene::SceneConfig;
use pcm::sphere::chordal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(name: &str, res: usize) -> (SceneConfig, ItineraryGrid, Components) {
    let s = gallery(name).unwrap().with_settings(Some((res, res)), None, None).unwrap();
    let grid = raster_itineraries(s.map(), s.viewport(), res, res, 24).unwrap();
    let comps = components(&grid);
    (s, grid, comps)
}

#[test]
fn periodic_components_map_back_into_themselves() {
    let mut seen = 0;
    for name in ["fig_attr", "fig_rot", "fig_rot2fix", "fig_rotann", "fig_parab", "fig_rotneutr"] {
        let (s, grid, comps) = setup(name, 256);
        for c in comps.list().iter().filter(|c| c.area >= 200 && !c.touches_edge) {
            let ComponentClass::Periodic(p) = classify_component(s.map(), &grid, &comps, c.id) else { continue };
            if p.periodicity.preperiod > 0 {
                continue;
            }
            seen += 1;
            let q = p.periodicity.period;
            let back = s.map().orbit(c.rep, q)[q];
            assert_eq!(comps.at_point(&grid, back), Some(c.id), "{name}: component {} period {q}", c.id);
        }
    }
    assert!(seen >= 10, "{seen} components checked");
}

#[test]
fn attracting_components_converge_under_the_return_map() {
    let (s, grid, comps) = setup("fig_attr", 256);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = 0;
    for c in comps.list().iter().filter(|c| c.area >= 50) {
        let ComponentClass::Periodic(p) = classify_component(s.map(), &grid, &comps, c.id) else { continue };
        if p.case != FatouCase::Ia || p.periodicity.preperiod > 0 {
            continue;
        }
        seen += 1;
        let attractor = p.return_map.classify().attracting.unwrap();
        let pixels = comps.pixels(c.id);
        for _ in 0..50 {
            let (i, j) = pixels[rng.gen_range(0..pixels.len())];
            let mut z = grid.pixel_center(i, j);
            for _ in 0..5000 {
                z = p.return_map.apply(z);
            }
            assert!(chordal(z, attractor) <= 1e-6, "component {}", c.id);
        }
    }
    assert!(seen > 0);
}

#[test]
fn rotation_return_maps_permute_their_component() {
    for (name, case) in [("fig_rot", FatouCase::Ib), ("fig_rot2fix", FatouCase::Ib), ("fig_rotann", FatouCase::III)] {
        let (s, grid, comps) = setup(name, 1024);
        let u = comps.at_point(&grid, s.marker("U").unwrap()).unwrap();
        let ComponentClass::Periodic(p) = classify_component(s.map(), &grid, &comps, u) else { panic!("{name}") };
        assert_eq!(p.case, case, "{name}");
        let pixels = comps.pixels(u);
        let kept = pixels
            .iter()
            .filter(|&&(i, j)| comps.at_point(&grid, p.return_map.apply(grid.pixel_center(i, j))) == Some(u))
            .count();
        let share = kept as f64 / pixels.len() as f64;
        assert!(share >= 0.99, "{name}: {share:.4}");
    }
}
