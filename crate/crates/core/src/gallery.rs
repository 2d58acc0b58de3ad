//! Built-in scenes. Each pairs a map with a viewport, a resolution and
//! marker points chosen to frame its picture.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fatou::Viewport;
use crate::scene::{
    CircleSpec, ConstraintSpec, MapSpec, Marker, RegionSpec, RenderToggles, SceneConfig, SceneFile, SideSpec,
};

/// Names of all built-in scenes, in listing order.
pub const GALLERY: [&str; 19] = [
    "fig_attr",
    "fig_rot",
    "fig_rotneutr",
    "fig_rotirr",
    "fig_parab",
    "fig_rot2fix",
    "fig_rotann",
    "fig_rotext",
    "fig_itin",
    "fig_wander",
    "fig_conn_left",
    "fig_conn_right",
    "fig_conninfty_left",
    "fig_conninfty_right",
    "fig_spidstable",
    "fig_spidunstable",
    "fig_schottky",
    "whole_sphere",
    "wander_squares",
];

/// One line per scene: name and a short description.
pub fn list() -> Vec<(&'static str, String)> {
    GALLERY.iter().map(|&n| (n, gallery(n).expect("built-in scenes are valid").file().description.clone())).collect()
}

/// Looks up a built-in scene by name.
pub fn gallery(name: &str) -> Result<SceneConfig> {
    let file = match name {
        "fig_attr" => rot_family(name, "attracting basins", polar(0.95, 2.0 * PI / 3.0), &[("U", [0.02, 0.01])]),
        "fig_rot" => rot_family(name, "rotation domains", polar(1.0, 2.0 * PI / 3.0), &[("U", [0.02, 0.01])]),
        "fig_rotneutr" => {
            rot_family(name, "neutral domain with F^6 = id", polar(1.0, 2.0 * PI / 3.0), &[("U", [-0.64, 0.23])])
        }
        "fig_rotirr" => {
            let alpha = (5f64.sqrt() - 1.0) / 2.0;
            rot_family(name, "irrational rotation domains", polar(1.0, alpha * PI), &[("U", [0.02, 0.01])])
        }
        "fig_parab" => two_region(
            name,
            "parabolic basin, fixed point 0 on the boundary",
            CircleSpec::disc([-0.5, 0.0], 0.5),
            MapSpec::from_complex(one(), zero(), -one(), one()),
            affine(-polar(1.1, 2.0 * PI / 3.0), polar(1.1, 2.0 * PI / 3.0)),
            Viewport::rect(-1.6, 1.0, -1.3, 1.3),
            &[("U", [-0.5, 0.0])],
        ),
        "fig_rot2fix" => two_region(
            name,
            "rotation domain containing both fixed points",
            CircleSpec::disc([1.0, 0.0], 0.5),
            affine(-Complex64::i(), Complex64::i()),
            affine(Complex64::i(), zero()),
            Viewport::rect(-2.0, 2.0, -2.0, 2.0),
            &[("U", [0.1, 0.05])],
        ),
        "fig_rotann" => {
            let l = polar(1.0, PI / 3.0);
            two_region(
                name,
                "rotation annulus without fixed points",
                CircleSpec::disc([0.0, 0.0], 1.0),
                affine(l * (4.0 / 3.0), zero()),
                affine(l * 0.75, zero()),
                Viewport::rect(-2.0, 2.0, -2.0, 2.0),
                &[("U", [0.05, 0.9])],
            )
        }
        "fig_rotext" => {
            let l = polar(1.0, PI / 3.0);
            two_region(
                name,
                "neutral domain with F^6 = id, contracting and expanding branches",
                CircleSpec::disc([-0.5, 0.0], 1.0),
                affine(l * 0.95, zero()),
                affine(l / 0.95, zero()),
                Viewport::rect(-2.5, 1.5, -2.0, 2.0),
                &[("U", [-0.55, 0.81])],
            )
        }
        "fig_itin" => {
            let l = polar(1.0, PI / 3.0);
            two_region(
                name,
                "components labelled by itineraries",
                CircleSpec::disc([0.25, 0.0], 0.25),
                affine(l, zero()),
                affine(-l, l),
                Viewport::rect(-1.0, 1.5, -1.25, 1.25),
                &[],
            )
        }
        "fig_wander" => wander(name, "orbit of the wandering square (0,1)x(0,1)", Viewport::rect(-1.0, 5.0, -1.0, 5.0)),
        "wander_squares" => {
            wander(name, "lattice of unit squares, all wandering", Viewport::rect(-6.0, 6.0, -6.0, 6.0))
        }
        "fig_conn_left" => conn(name, "4-connected outer component", polar(1.0, PI / 2.0)),
        "fig_conn_right" => conn(name, "5-connected outer component", polar(1.0, 2.0 * PI / 5.0)),
        "fig_conninfty_left" => two_region(
            name,
            "infinitely connected outer component (discs accumulating at 0)",
            CircleSpec::disc([1.0, 0.0], 1.0 / 3.0),
            affine(one(), zero()),
            affine(Complex64::new(2.0, 0.0), zero()),
            Viewport::rect(-0.5, 1.5, -1.0, 1.0),
            &[("outer", [0.0, 0.6])],
        ),
        "fig_conninfty_right" => {
            let mut f = conn(name, "infinitely connected outer component (spiral)", polar(1.2, 2.0 * PI / 5.0));
            f.viewport = Viewport::rect(-2.0, 2.0, -2.0, 2.0);
            f
        }
        "fig_spidstable" => spider(name, "Fuchsian group, boundary |z| = 2 away from the limit set", [0.0, 0.0], 2.0),
        "fig_spidunstable" => {
            spider(name, "Fuchsian group, boundary |z + 3/2| = 1 crossing the limit set", [-1.5, 0.0], 1.0)
        }
        "fig_schottky" => schottky(name, 0.6),
        "whole_sphere" => two_region(
            name,
            "pre-discontinuity set dense in the sphere",
            CircleSpec::disc([0.0, 0.0], 1.0),
            affine(Complex64::new(2.0, 0.0), zero()),
            affine(Complex64::new(2.0 / 3.0, 0.0), zero()),
            Viewport::rect(-2.0, 2.0, -2.0, 2.0),
            &[],
        ),
        _ => return Err(Error::UnknownScene { name: name.to_string(), available: suggestions(name) }),
    };
    SceneConfig::new(file)
}

/// The Schottky scene with pairing radius `lambda`.
///
/// Each branch pairs two isometric circles of radius `lambda`: the first maps
/// |z + 3| = λ onto |z − 3| = λ, the second |z + 3i| = λ onto |z − 3i| = λ.
/// The discontinuity circle |z − i| = 1/2 lies in their common exterior.
pub fn schottky_scene(lambda: f64) -> Result<SceneConfig> {
    SceneConfig::new(schottky("fig_schottky", lambda))
}

/// The two isometric-circle pairing branches used by [`schottky_scene`].
pub fn schottky_maps(lambda: f64) -> (MapSpec, MapSpec) {
    let pair = |p: Complex64| MapSpec::from_complex(p, p * p + lambda * lambda, one(), p);
    (pair(Complex64::new(3.0, 0.0)), pair(Complex64::new(0.0, 3.0)))
}

fn schottky(name: &str, lambda: f64) -> SceneFile {
    let (f, g) = schottky_maps(lambda);
    two_region(
        name,
        "Schottky group, boundary |z - i| = 1/2 in a fundamental region",
        CircleSpec::disc([0.0, 1.0], 0.5),
        f,
        g,
        Viewport::rect(-4.5, 4.5, -4.5, 4.5),
        &[],
    )
}

/// The branches shared by the two spider-web scenes.
pub fn spider_maps() -> (MapSpec, MapSpec) {
    let i = Complex64::i();
    (MapSpec::from_complex(one() + i, i, -i, one() - i), MapSpec::from_complex(one() + i, -i, i, one() - i))
}

fn spider(name: &str, description: &str, center: [f64; 2], radius: f64) -> SceneFile {
    let (f, g) = spider_maps();
    let mut file = two_region(
        name,
        description,
        CircleSpec::disc(center, radius),
        f,
        g,
        Viewport::rect(center[0] - 3.0, center[0] + 3.0, -3.0, 3.0),
        &[],
    );
    file.depth = 6;
    file
}

fn rot_family(name: &str, description: &str, lambda: Complex64, markers: &[(&str, [f64; 2])]) -> SceneFile {
    two_region(
        name,
        description,
        CircleSpec::disc([-0.5, 0.0], 1.0),
        affine(lambda, zero()),
        affine(-lambda, lambda),
        Viewport::rect(-2.5, 1.5, -2.0, 2.0),
        markers,
    )
}

fn wander(name: &str, description: &str, viewport: Viewport) -> SceneFile {
    let i = Complex64::i();
    let mut file = two_region(
        name,
        description,
        CircleSpec { a: 0.0, b: [0.0, 1.0], d: 0.0 },
        affine(i, zero()),
        affine(-i, one() + i),
        viewport,
        &[("U", [0.5, 0.5])],
    );
    file.depth = 12;
    file
}

fn conn(name: &str, description: &str, lambda: Complex64) -> SceneFile {
    two_region(
        name,
        description,
        CircleSpec::disc([1.5, 0.0], 0.5),
        affine(Complex64::new(2.0, 0.0), zero()),
        affine(lambda, zero()),
        Viewport::rect(-2.5, 2.5, -2.5, 2.5),
        &[("outer", [0.0, 0.0])],
    )
}

/// Region 0 is the negative side of `circle` with branch `inside`; region 1
/// is its complement with branch `outside`.
fn two_region(
    name: &str,
    description: &str,
    circle: CircleSpec,
    inside: MapSpec,
    outside: MapSpec,
    viewport: Viewport,
    markers: &[(&str, [f64; 2])],
) -> SceneFile {
    let constraint = |side| vec![ConstraintSpec { circle, side }];
    SceneFile {
        name: name.to_string(),
        description: description.to_string(),
        regions: vec![
            RegionSpec { constraints: constraint(SideSpec::Negative), map: inside, interior: None },
            RegionSpec { constraints: constraint(SideSpec::Positive), map: outside, interior: None },
        ],
        viewport,
        resolution: [1024, 1024],
        prefix: 24,
        depth: 8,
        render: RenderToggles::default(),
        output: Some(format!("{name}.ppm")),
        markers: markers.iter().map(|(l, p)| Marker { label: l.to_string(), point: *p }).collect(),
    }
}

fn affine(a: Complex64, b: Complex64) -> MapSpec {
    MapSpec::from_complex(a, b, zero(), one())
}

fn polar(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Scene names sharing a prefix or an underscore-separated part with `name`,
/// or the full list when nothing is close.
fn suggestions(name: &str) -> Vec<String> {
    let close: Vec<String> = GALLERY
        .iter()
        .filter(|g| {
            let g = g.to_lowercase();
            let n = name.to_lowercase();
            !n.is_empty()
                && (g.starts_with(&n) || n.starts_with(&g) || n.split('_').any(|p| p.len() > 3 && g.contains(p)))
        })
        .map(|g| g.to_string())
        .collect();
    if close.is_empty() {
        GALLERY.iter().map(|g| g.to_string()).collect()
    } else {
        close
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{Moebius, SpherePoint};

    #[test]
    fn every_scene_loads() {
        for name in GALLERY {
            let s = gallery(name).unwrap();
            assert_eq!(s.name(), name);
        }
        assert_eq!(list().len(), 19);
    }

    #[test]
    fn conninfty_left_is_identity_on_the_disc() {
        let s = gallery("fig_conninfty_left").unwrap();
        let f = s.map();
        assert!(f.branch(0).is_identity());
        assert!(f.branch(1).compose(&Moebius::scaling(Complex64::new(0.5, 0.0)).unwrap()).is_identity());
        let c = f.partition().regions()[0].constraints()[0].0.center_radius().unwrap();
        assert!((c.0 - Complex64::new(1.0, 0.0)).norm() < 1e-12 && (c.1 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn parabolic_branch_fixes_zero() {
        let s = gallery("fig_parab").unwrap();
        let b = s.map().branch(0);
        assert_eq!(b.apply(SpherePoint::ZERO), SpherePoint::ZERO);
        assert!((b.trace_sq() - 4.0).norm() < 1e-12);
    }

    #[test]
    fn unknown_names_list_alternatives() {
        match gallery("nope") {
            Err(Error::UnknownScene { available, .. }) => assert_eq!(available.len(), 19),
            other => panic!("{other:?}"),
        }
        match gallery("fig_con") {
            Err(Error::UnknownScene { available, .. }) => assert!(available.iter().all(|a| a.starts_with("fig_con"))),
            other => panic!("{other:?}"),
        }
    }
}
