use pcm::gallery::{gallery, GALLERY};
use pcm::prediscontinuity::pd_up_to;
use pcm::verify::{preimage_grid_agreement, strata_checks, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn arc_samples_reach_the_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in GALLERY {
        let s = gallery(name).unwrap();
        let f = s.map();
        let strata = pd_up_to(f, 4).unwrap();
        let arcs: Vec<(usize, _)> = (0..=4).flat_map(|n| strata.shells()[n].arcs().map(move |a| (n, *a))).collect();
        for _ in 0..500 {
            let (n, arc) = &arcs[rng.gen_range(0..arcs.len())];
            let q = arc.point_at(rng.gen_range(0.0..1.0));
            // some iterate up to the arc's level lands on the boundary
            let hit = f.orbit(q, *n).into_iter().any(|p| f.partition().near_boundary(p, 1e-7));
            assert!(hit, "{name}: level {n} sample {q} never meets the boundary");
        }
    }
}

#[test]
fn strata_invariants_hold_to_level_six() {
    for name in GALLERY {
        let s = gallery(name).unwrap();
        let strata = pd_up_to(s.map(), 6).unwrap();
        for c in strata_checks(s.map(), &strata) {
            assert_eq!(c.status, Status::Pass, "{name}: {} {}", c.name, c.detail);
        }
    }
}

#[test]
fn pullback_of_a_stratum_lies_in_the_next() {
    for name in ["fig_attr", "fig_conn_left", "fig_spidstable", "whole_sphere", "fig_wander"] {
        let s = gallery(name).unwrap();
        let f = s.map();
        let strata = pd_up_to(f, 4).unwrap();
        let regions = f.partition().regions();
        for n in 0..4 {
            for arc in strata.arcs_up_to(n) {
                for (m, branch) in f.branches().iter().enumerate() {
                    let Ok(pre) = arc.map(&branch.inverse()) else { continue };
                    for p in pre.interior_samples(8) {
                        if regions[m].contains_closed(p, 1e-12) {
                            let d = strata.distance_up_to(n + 1, p);
                            assert!(d <= 1e-7, "{name}: pullback of level {n} misses PD_{} by {d:.3e}", n + 1);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn brute_force_preimages_match_the_arcs() {
    for name in ["fig_attr", "fig_conn_left", "fig_wander", "fig_spidunstable", "fig_rot2fix"] {
        let s = gallery(name).unwrap();
        let strata = pd_up_to(s.map(), 4).unwrap();
        let (a, b) = preimage_grid_agreement(s.map(), &strata, 4, &s.viewport(), 512, 512);
        assert!(a <= 2.0 && b <= 2.0, "{name}: grid to arcs {a:.3} px, arcs to grid {b:.3} px");
    }
}
