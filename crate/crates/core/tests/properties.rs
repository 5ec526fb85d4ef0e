mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::DVector;
use prismatic::complex;
use prismatic::hypgeom::{self, lateral_arc, lower_edge_length};
use prismatic::solver::{self, CurvatureTarget, SolveOptions};
use prismatic::{fixtures, ResultDocument, SurfaceDocument};
use proptest::prelude::*;
use rand::Rng;

fn prism() -> impl Strategy<Value = ([f64; 3], [f64; 3])> {
    any::<u64>().prop_map(|seed| random_admissible_prism(&mut rng(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lateral_arc_splits_into_face_and_decay(ri in -3.0..3.0f64, rj in -3.0..3.0f64, l in -3.0..3.0f64) {
        let alpha = lateral_arc(ri, rj, l).unwrap();
        let face = (rj - ri - l).exp();
        let decay = (-2.0 * ri).exp();
        prop_assert!((alpha * alpha - face - decay).abs() <= 1e-12 * (face + decay));
    }

    #[test]
    fn lower_edge_depends_on_l_minus_r(l in -4.0..4.0f64, r1 in -3.0..3.0f64, r2 in -3.0..3.0f64, c in -5.0..5.0f64) {
        let a = lower_edge_length(l, r1, r2).unwrap();
        let b = lower_edge_length(l + c, r1 + c, r2).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        let back = hypgeom::upper_exponent_from_lower(a).unwrap();
        prop_assert!((back - (l - r1 - r2)).abs() <= 1e-10);
    }

    #[test]
    fn corner_angles_sum_to_pi((l, r) in prism()) {
        let p = hypgeom::prism_angles(l, r).unwrap();
        for i in 0..3 {
            prop_assert!(p.corner_defect(i).abs() <= 1e-12, "corner {i}: {}", p.corner_defect(i));
        }
        let second = hypgeom::phi_from_second_endpoint(l, r).unwrap();
        for (s, p) in second.iter().zip(p.phi) {
            prop_assert!((s - p).abs() <= 1e-10);
        }
    }

    #[test]
    fn corner_derivatives_match_differences((l, r) in prism()) {
        let h = 1e-6;
        for corner in 0..3 {
            let d = hypgeom::corner_derivatives(l, r, corner).unwrap();
            for k in 0..3 {
                let (mut rp, mut rm) = (r, r);
                rp[k] += h;
                rm[k] -= h;
                let (Ok(p), Ok(m)) = (hypgeom::prism_angles(l, rp), hypgeom::prism_angles(l, rm)) else {
                    continue;
                };
                let fd = (p.omega[corner] - m.omega[corner]) / (2.0 * h);
                prop_assert!((fd - d[k]).abs() <= 1e-5 * d[k].abs().max(1.0), "corner {corner}, r{k}: {fd} vs {}", d[k]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flip_then_inverse_is_identity(seed in any::<u64>(), which in 0usize..2) {
        let mut rng = rng(seed);
        let m = random_flips(&mut rng, &bases()[which], 3);
        for e in 0..m.surface().num_edges() {
            if !m.surface().is_flippable(e) {
                continue;
            }
            let back = m.flip(e).unwrap().flip_inverse(e).unwrap();
            prop_assert_eq!(back.surface(), m.surface());
            prop_assert!(max_abs_diff(back.lengths(), m.lengths()) <= 1e-12);
        }
    }

    #[test]
    fn cusp_orbits_cover_all_corners(seed in any::<u64>(), which in 0usize..2) {
        let m = random_flips(&mut rng(seed), &bases()[which], 8);
        let s = m.surface();
        let total: usize = (0..s.num_cusps()).map(|c| s.cusp_orbit(c).len()).sum();
        prop_assert_eq!(total, 3 * s.num_triangles());
        let stars: usize = (0..s.num_cusps()).map(|c| s.oriented_star(c).unwrap().outgoing.len()).sum();
        prop_assert_eq!(stars, 2 * s.num_edges());
    }

    #[test]
    fn surface_document_round_trips(seed in any::<u64>(), which in 0usize..2) {
        let mut rng = rng(seed);
        let m = random_flips(&mut rng, &bases()[which], 4);
        let n = m.surface().num_cusps();
        let w = uniform(&mut rng, n, -2.0, 2.0);
        let doc = SurfaceDocument::from_metric(&m, Some(&w), Some(&vec![0.0; n]));
        let back = SurfaceDocument::parse(&doc.to_json()).unwrap();
        prop_assert_eq!(&back, &doc);
        let again = SurfaceDocument::from_metric(&back.metric().unwrap(), back.weights.as_deref(), None);
        prop_assert_eq!(again.gluings, doc.gluings);
    }

    #[test]
    fn result_document_round_trips(seed in any::<u64>(), which in 0usize..2) {
        let state = random_convex_state(&mut rng(seed), &bases()[which]);
        let doc = ResultDocument::from_state(&state, vec![]).unwrap();
        let text = doc.to_json();
        prop_assert_eq!(ResultDocument::parse(&text).unwrap(), doc);
    }

    #[test]
    fn hessian_is_negative_definite(seed in any::<u64>(), which in 0usize..2) {
        let mut rng = rng(seed);
        let state = random_convex_state(&mut rng, &bases()[which]);
        let x = solver::hessian(&state).unwrap();
        for _ in 0..20 {
            let v = DVector::from_vec(uniform(&mut rng, x.nrows(), -1.0, 1.0));
            prop_assert!(v.dot(&(&x * &v)) < 0.0);
        }
    }

    #[test]
    fn convex_states_satisfy_gauss_bonnet(seed in any::<u64>(), which in 0usize..2) {
        let state = random_convex_state(&mut rng(seed), &bases()[which]);
        prop_assert!(state.theta().iter().all(|&t| t >= -1e-12));
        let lower = complex::lower_metric(&state).unwrap();
        prop_assert!(complex::gauss_bonnet_residual(&state, &lower).abs() <= 1e-9);
        prop_assert!(max_abs_diff(lower.cone_angles(), state.omega()) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn newton_residual_never_increases(seed in any::<u64>(), which in 0usize..2) {
        let mut rng = rng(seed);
        let m = &bases()[which];
        let n = m.surface().num_cusps();
        let kappa: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let target = CurvatureTarget::new(m.surface(), kappa).unwrap();
        let rep = solver::solve(m, &target, &SolveOptions::default()).unwrap();
        for w in rep.trace.windows(2) {
            prop_assert!(w[1] <= w[0], "trace {:?}", rep.trace);
        }
        prop_assert!(rep.residual <= 1e-10);
    }
}

#[test]
fn very_negative_weight_closes_the_cusp() {
    let m = fixtures::two_cusp_metric();
    let d = complex::delaunayize(&m, &[-10.0, 0.0]).unwrap();
    assert!(d.state.omega()[0] < 0.01, "{:?}", d.state.omega());
}

#[test]
fn large_weights_approach_the_angle_bound() {
    for m in bases() {
        let s = m.surface();
        let bound = 2.0 * PI * (s.num_cusps() + 2 * s.genus()) as f64 - 4.0 * PI;
        let r = vec![12.0; s.num_cusps()];
        let d = complex::delaunayize(&m, &r).unwrap();
        let total: f64 = d.state.omega().iter().sum();
        assert!(total < bound && total > bound - 0.01, "Σω̃ = {total}, bound {bound}");
    }
}
