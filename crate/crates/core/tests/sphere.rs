use num_complex::Complex64;
use pcm::sphere::{chordal, map_circle, GenCircle, Moebius, MoebiusKind, SpherePoint};
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(x, y)| Complex64::new(x, y))
}

fn point() -> impl Strategy<Value = SpherePoint> {
    (-1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        SpherePoint::from_unit_vector([r * phi.cos(), r * phi.sin(), z])
    })
}

// entries of moderate size with a determinant bounded away from zero
fn moebius() -> impl Strategy<Value = Moebius> {
    (complex(2.0), complex(2.0), complex(2.0), complex(2.0))
        .prop_filter("well conditioned", |(a, b, c, d)| (a * d - b * c).norm() > 0.1)
        .prop_map(|(a, b, c, d)| Moebius::new(a, b, c, d).unwrap())
}

fn circle() -> impl Strategy<Value = GenCircle> {
    (complex(2.0), 0.1..2.0f64).prop_map(|(c, r)| GenCircle::circle(c, r).unwrap())
}

// w ↦ (p w + q)/(w + 1) sends 0 to q and ∞ to p
fn chart(p: Complex64, q: Complex64) -> Moebius {
    Moebius::new(p, q, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap()
}

fn distinct_pair() -> impl Strategy<Value = (Complex64, Complex64)> {
    (complex(2.0), complex(2.0)).prop_filter("distinct", |(p, q)| (p - q).norm() > 0.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn composition_is_the_group_action(m1 in moebius(), m2 in moebius(), pts in prop::collection::vec(point(), 100)) {
        let m = m1.compose(&m2);
        for p in pts {
            prop_assert!(chordal(m.apply(p), m1.apply(m2.apply(p))) <= 1e-9);
        }
    }

    #[test]
    fn mapped_circle_carries_the_samples(m in moebius(), c in circle()) {
        let image = map_circle(&m, &c).unwrap();
        let chart = c.chart();
        for k in 0..64 {
            let s = chart.point(k as f64 * std::f64::consts::TAU / 64.0);
            prop_assert!(image.form(m.apply(s)).abs() <= 1e-9);
        }
    }

    #[test]
    fn inverse_transport_recovers_the_circle(m in moebius(), c in circle()) {
        let back = map_circle(&m.inverse(), &map_circle(&m, &c).unwrap()).unwrap().canonical();
        let (a0, b0, d0) = c.canonical().coefficients();
        let (a1, b1, d1) = back.coefficients();
        prop_assert!((a0 - a1).abs() <= 1e-9 && (b0 - b1).norm() <= 1e-9 && (d0 - d1).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn loxodromic_orbits_reach_the_attracting_point(
        (p, q) in distinct_pair(),
        modulus in 0.2..0.8f64,
        angle in -3.0..3.0f64,
        w in complex(3.0),
    ) {
        let c = chart(p, q);
        let k = Complex64::from_polar(modulus, angle);
        let m = c.compose(&Moebius::scaling(k).unwrap()).compose(&c.inverse());
        let class = m.classify();
        prop_assert!(class.kind.is_loxodromic());
        prop_assert!(class.kind != MoebiusKind::Hyperbolic || angle.abs() < 1e-6);
        let attractor = class.attracting.unwrap();
        prop_assert!(chordal(attractor, SpherePoint::Finite(q)) < 1e-9);
        let start = c.apply(SpherePoint::Finite(w));
        prop_assume!(chordal(start, SpherePoint::Finite(p)) > 1e-3);
        let mut z = start;
        for _ in 0..200 {
            z = m.apply(z);
        }
        prop_assert!(chordal(z, attractor) <= 1e-6);
    }

    #[test]
    fn elliptic_orbits_keep_their_radius(
        (p, q) in distinct_pair(),
        angle in 0.05..3.1f64,
        radius in 0.2..5.0f64,
        phase in 0.0..std::f64::consts::TAU,
    ) {
        let c = chart(p, q);
        let m = c.compose(&Moebius::scaling(Complex64::from_polar(1.0, angle)).unwrap()).compose(&c.inverse());
        prop_assert_eq!(m.classify().kind, MoebiusKind::Elliptic);
        let back = c.inverse();
        let mut z = c.apply(SpherePoint::Finite(Complex64::from_polar(radius, phase)));
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..200 {
            z = m.apply(z);
            let r = back.apply(z).finite().unwrap().norm();
            lo = lo.min(r);
            hi = hi.max(r);
        }
        prop_assert!(hi - lo <= 1e-6, "spread {}", hi - lo);
    }

    #[test]
    fn conjugated_translations_are_parabolic(p in complex(2.0), t in complex(2.0)) {
        prop_assume!(t.norm() > 0.1);
        let c = Moebius::new(p, Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let m = c.compose(&Moebius::translation(t)).compose(&c.inverse());
        let class = m.classify();
        prop_assert_eq!(class.kind, MoebiusKind::Parabolic);
        prop_assert!(chordal(class.fixed_points[0].point, SpherePoint::Finite(p)) < 1e-6);
    }
}
