use num_complex::Complex64;
use pcm::gallery::gallery;
use pcm::sphere::{Arc, GenCircle, SpherePoint};
use pcm::stability::{
    continuity_probe, directed, hausdorff, structural_stability_probe, DeformationSpec, StabilityParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_arc(rng: &mut ChaCha8Rng) -> Arc {
    let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let circle = GenCircle::circle(c, rng.gen_range(0.1..2.0)).unwrap();
    Arc::new(&circle, rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.5..std::f64::consts::TAU))
}

fn random_set(rng: &mut ChaCha8Rng) -> Vec<SpherePoint> {
    let arcs = rng.gen_range(1..4);
    (0..arcs).flat_map(|_| random_arc(rng).samples(50.0)).collect()
}

#[test]
fn hausdorff_is_a_metric_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let (a, b, c) = (random_set(&mut rng), random_set(&mut rng), random_set(&mut rng));
        let ab = hausdorff(&a, &b).unwrap();
        assert_eq!(ab, hausdorff(&b, &a).unwrap());
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        assert!(hausdorff(&a, &c).unwrap() <= ab + hausdorff(&b, &c).unwrap() + 1e-12);
    }
}

#[test]
fn empty_sets_are_rejected() {
    let a = vec![SpherePoint::new(0.0, 0.0)];
    assert!(hausdorff(&a, &[]).is_err());
    assert!(directed(&[], &a).is_err());
}

#[test]
fn refining_samples_stays_within_the_gap_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let (a, b) = (random_arc(&mut rng), random_arc(&mut rng));
        for density in [25.0, 50.0, 100.0, 200.0] {
            let coarse = hausdorff(&a.samples(density), &b.samples(density)).unwrap();
            let fine = hausdorff(&a.samples(2.0 * density), &b.samples(2.0 * density)).unwrap();
            let spacing = |arc: &Arc| arc.chordal_length() / (arc.chordal_length() * density).ceil();
            let bound = 2.0 * spacing(&a).max(spacing(&b));
            assert!(fine <= coarse + bound, "coarse {coarse} fine {fine} bound {bound}");
        }
    }
}

fn spider_family(schedule: Vec<f64>) -> DeformationSpec {
    DeformationSpec::radius(Complex64::new(0.0, 0.0), 2.0, -1.0, schedule)
}

#[test]
fn zero_deformation_gives_zero_distance() {
    let s = gallery("fig_spidstable").unwrap();
    let table = continuity_probe(s.map().branch(0), s.map().branch(1), &spider_family(vec![0.0]), 4).unwrap();
    assert_eq!(table.distances(), vec![0.0]);
}

#[test]
fn halving_the_deformation_roughly_halves_the_distance() {
    let s = gallery("fig_spidstable").unwrap();
    let table =
        continuity_probe(s.map().branch(0), s.map().branch(1), &spider_family(vec![0.2, 0.1, 0.05, 0.025]), 8).unwrap();
    assert!(table.strictly_decreasing(), "{table}");
    // halving within a factor 4 of the ideal ratio 1/2
    for r in table.ratios() {
        assert!((0.125..=2.0).contains(&r), "{table}");
    }
    for row in &table.rows {
        assert!(row.boundary_limit > 0.1, "{table}");
    }
}

#[test]
fn a_map_is_stable_against_itself() {
    let s = gallery("fig_schottky").unwrap();
    let params = StabilityParams { viewport: s.viewport(), width: 128, height: 128, prefix: 16, depth: 4 };
    let report = structural_stability_probe(s.map(), s.map(), &params).unwrap();
    assert_eq!(report.agreement, 1.0);
    assert_eq!(report.max_drift(), 0.0);
    assert!(report.hypothesis_holds());
}

#[test]
fn crossing_the_limit_set_fails_the_hypothesis() {
    let s = gallery("fig_spidunstable").unwrap();
    let params = StabilityParams { viewport: s.viewport(), width: 64, height: 64, prefix: 8, depth: 3 };
    let report = structural_stability_probe(s.map(), s.map(), &params).unwrap();
    assert!(!report.hypothesis_holds());
    assert!(report.to_string().contains("not detected"));
}

#[test]
fn different_partitions_are_rejected() {
    let a = gallery("fig_spidstable").unwrap();
    let b = gallery("fig_spidunstable").unwrap();
    let params = StabilityParams { viewport: a.viewport(), width: 16, height: 16, prefix: 4, depth: 1 };
    assert!(structural_stability_probe(a.map(), b.map(), &params).is_err());
}
