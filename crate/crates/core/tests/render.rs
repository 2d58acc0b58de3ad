use std::collections::HashMap;

use num_complex::Complex64;
use pcm::fatou::{components, raster_itineraries, Viewport};
use pcm::gallery::{gallery, GALLERY};
use pcm::prediscontinuity::pd_up_to;
use pcm::render::{overlay_pixels, render, Image, BLACK, PALETTE_SIZE, RED};
use pcm::scene::SceneConfig;
use pcm::sphere::SpherePoint;
use pcm::verify::overlay_soundness;

fn at(scene: &SceneConfig, image: &Image, p: SpherePoint) -> [u8; 3] {
    let (w, h) = scene.resolution();
    let (i, j) = scene.viewport().pixel_of(p, w, h).unwrap();
    image.get(i, j)
}

#[test]
fn conn_left_shows_one_outer_color_and_four_discs() {
    let s = gallery("fig_conn_left").unwrap();
    let r = render(&s).unwrap();
    let (w, h) = s.resolution();
    assert_eq!((w, h), (1024, 1024));
    let grid = raster_itineraries(s.map(), s.viewport(), w, h, s.prefix()).unwrap();
    let comps = components(&grid);
    let outer = comps.at_point(&grid, s.marker("outer").unwrap()).unwrap();
    let mut colors: Vec<[u8; 3]> =
        comps.pixels(outer).into_iter().map(|(i, j)| r.image.get(i, j)).filter(|&c| c != BLACK && c != RED).collect();
    colors.sort();
    colors.dedup();
    assert_eq!(colors.len(), 1);
    let outer_color = colors[0];
    for k in 0..4 {
        let center = Complex64::i().powi(k) * 1.5;
        let inside = at(&s, &r.image, SpherePoint::Finite(center));
        assert!(inside != outer_color && inside != BLACK, "disc {k}");
        for t in 0..16 {
            let rim = center + Complex64::from_polar(0.5, t as f64 * std::f64::consts::TAU / 16.0);
            let (i, j) = s.viewport().pixel_of(SpherePoint::Finite(rim), w, h).unwrap();
            let near_black = (i.saturating_sub(1)..=i + 1)
                .flat_map(|x| (j.saturating_sub(1)..=j + 1).map(move |y| (x, y)))
                .any(|(x, y)| r.image.get(x, y) == BLACK);
            assert!(near_black, "disc {k} rim sample {t}");
        }
    }
}

#[test]
fn wandering_orbit_squares_have_distinct_colors() {
    let s = gallery("fig_wander").unwrap();
    assert_eq!(s.viewport(), Viewport::rect(-1.0, 5.0, -1.0, 5.0));
    let r = render(&s).unwrap();
    let visible: Vec<SpherePoint> = s
        .map()
        .orbit(SpherePoint::new(0.5, 0.5), 40)
        .into_iter()
        .filter(|p| p.finite().is_some_and(|z| z.re > -1.0 && z.re < 5.0 && z.im > -1.0 && z.im < 5.0))
        .collect();
    let mut seen: HashMap<[u8; 3], Complex64> = HashMap::new();
    let mut squares = 0;
    for p in visible {
        let z = p.finite().unwrap();
        let square = (z.re.floor(), z.im.floor());
        if seen.values().any(|q| (q.re.floor(), q.im.floor()) == square) {
            continue;
        }
        squares += 1;
        let c = at(&s, &r.image, p);
        assert!(c != BLACK && c != RED);
        assert!(seen.insert(c, z).is_none(), "{z} shares a color");
    }
    assert!(squares >= 6, "{squares}");
}

#[test]
fn renders_are_deterministic() {
    for name in ["fig_attr", "fig_conninfty_right", "fig_schottky"] {
        let s = gallery(name).unwrap().with_settings(Some((200, 150)), None, None).unwrap();
        assert_eq!(render(&s).unwrap().image.to_ppm(), render(&s).unwrap().image.to_ppm(), "{name}");
    }
}

#[test]
fn overlay_is_sound_in_every_scene() {
    for name in GALLERY {
        let s = gallery(name).unwrap();
        let (w, h) = (256, 256);
        let strata = pd_up_to(s.map(), s.depth()).unwrap();
        let black = overlay_pixels(&strata, &s.viewport(), w, h);
        let (a, b) = overlay_soundness(&strata, &s.viewport(), w, h, &black);
        assert!(a <= 1.0 && b <= 1.0, "{name}: {a:.3} / {b:.3}");
    }
}

fn colors_by_class(name: &str) -> (Vec<Vec<[u8; 3]>>, usize) {
    let s = gallery(name).unwrap().with_settings(Some((256, 256)), None, None).unwrap();
    let mut plain = s.file().clone();
    plain.render.pd_overlay = false;
    plain.render.periodic_markers = false;
    let s = SceneConfig::new(plain).unwrap();
    let r = render(&s).unwrap();
    let grid = raster_itineraries(s.map(), s.viewport(), 256, 256, s.prefix()).unwrap();
    let mut by_class = vec![Vec::new(); grid.class_count()];
    for (k, &c) in grid.classes().iter().enumerate() {
        by_class[c as usize].push(r.image.get(k % 256, k / 256));
    }
    (by_class, grid.class_count())
}

#[test]
fn equal_prefixes_get_equal_colors() {
    for name in GALLERY {
        let (by_class, _) = colors_by_class(name);
        for colors in by_class {
            assert!(colors.windows(2).all(|w| w[0] == w[1]), "{name}");
        }
    }
}

#[test]
fn equal_colors_share_a_prefix_when_prefixes_fit_the_palette() {
    let mut checked = 0;
    for name in GALLERY {
        let (by_class, count) = colors_by_class(name);
        if count > PALETTE_SIZE {
            continue;
        }
        checked += 1;
        let mut owner: HashMap<[u8; 3], usize> = HashMap::new();
        for (class, colors) in by_class.iter().enumerate() {
            assert_eq!(*owner.entry(colors[0]).or_insert(class), class, "{name}: two prefixes share a color");
        }
    }
    assert!(checked >= 8, "{checked}");
}

#[test]
fn ppm_layout() {
    let s = gallery("fig_rot").unwrap().with_settings(Some((20, 16)), None, None).unwrap();
    let bytes = render(&s).unwrap().image.to_ppm();
    assert!(bytes.starts_with(b"P6\n20 16\n255\n"));
    assert_eq!(bytes.len(), b"P6\n20 16\n255\n".len() + 20 * 16 * 3);
}
