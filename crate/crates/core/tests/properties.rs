//! Property tests over random metrics, potentials and points.

use proptest::prelude::*;

use yamabe_core::catalog::{self, CatalogOptions};
use yamabe_core::curvature::{
    contracted_bianchi_residual, max_single_trace, ricci_identity_residual,
    riemann_symmetry_residual,
};
use yamabe_core::jets::{component_jets, FieldSpec, Point};
use yamabe_core::levelset::adapted_frame_at;
use yamabe_core::soliton::{d_norm_sides, d_tensor_at, evaluate_point_to, weyl_gradient, MParam};

fn instance(n: usize, seed: u64) -> yamabe_core::soliton::SolitonInstance {
    catalog::instance(
        &format!("RANDOMPOLY{n}"),
        &CatalogOptions {
            seed,
            ..Default::default()
        },
    )
    .unwrap()
}

fn point(n: usize, raw: &[f64]) -> Point {
    Point::new(raw[..n].iter().map(|v| 0.9 * v).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_identities(n in 3usize..=5, seed in 0u64..1000, raw in prop::collection::vec(-1.0f64..1.0, 5)) {
        let inst = instance(n, seed);
        let pe = evaluate_point_to(&inst, &point(n, &raw), 3).unwrap();
        let rm = pe.cp.riemann.max_abs().max(1.0);
        prop_assert!(riemann_symmetry_residual(&pe.cp.riemann) < 1e-12 * rm);
        prop_assert!(contracted_bianchi_residual(&pe.cp) < 1e-11 * rm);
        prop_assert!(max_single_trace(&pe.cp.weyl, &pe.cp.inverse) < 1e-12 * rm);
        prop_assert!(ricci_identity_residual(&pe.f, &pe.cp) < 1e-11 * rm * (1.0 + pe.f.third.max_abs()));
        if n == 3 {
            prop_assert!(pe.cp.weyl.max_abs() < 1e-12 * rm);
        }
    }

    /// Trace-freeness, antisymmetry and the frame formula for `|D|²` hold for
    /// any metric and potential; the soliton equation is not needed.
    #[test]
    fn d_tensor_algebra(n in 3usize..=5, seed in 0u64..1000, raw in prop::collection::vec(-1.0f64..1.0, 5)) {
        let inst = instance(n, seed);
        let pe = evaluate_point_to(&inst, &point(n, &raw), 2).unwrap();
        prop_assume!(pe.require_regular().is_ok());
        let d = d_tensor_at(&pe);
        prop_assert_eq!(d.antisymmetry(), 0.0);
        let (a, b) = d.traces(&pe.cp.inverse);
        prop_assert!(a.max(b) < 1e-12 * d.d.max_abs().max(1.0));
        prop_assert!(d_norm_sides(&pe).unwrap().relative_difference() < 1e-10);
    }

    /// `W(·,·,·,∇f)` is always trace-free in its first slot pair and
    /// antisymmetric, like `D`.
    #[test]
    fn weyl_gradient_structure(n in 4usize..=5, seed in 0u64..1000, raw in prop::collection::vec(-1.0f64..1.0, 5)) {
        let inst = instance(n, seed);
        let pe = evaluate_point_to(&inst, &point(n, &raw), 2).unwrap();
        let w = weyl_gradient(&pe);
        let s = w.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert!((w[[i, j, k]] + w[[j, i, k]]).abs() < 1e-13 * s);
                }
            }
        }
    }

    #[test]
    fn adapted_frame_is_orthonormal(n in 3usize..=5, seed in 0u64..1000, raw in prop::collection::vec(-1.0f64..1.0, 5)) {
        let inst = instance(n, seed);
        let pe = evaluate_point_to(&inst, &point(n, &raw), 2).unwrap();
        prop_assume!(pe.require_regular().is_ok());
        let fr = adapted_frame_at(&pe).unwrap();
        prop_assert!(fr.orthonormality_defect(&pe.cp.metric) < 1e-12);
        let e1 = &fr.vectors[0];
        for (a, g) in e1.iter().zip(&pe.grad_up) {
            prop_assert!((a - g / pe.grad_norm()).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    /// Exact jets of an expression against central differences of its values.
    #[test]
    fn ad_matches_finite_differences(
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
        x in prop::collection::vec(-0.8f64..0.8, 3),
    ) {
        let src = format!("exp({a}*x1) * sin({b}*x2 + x3) + ({c})*x1*x2*x3*x3");
        let f = FieldSpec::scalar_expr(3, &src).unwrap();
        let g = f.clone();
        let bb = FieldSpec::black_box(3, 1, "fd", move |p| g.eval(p).unwrap());
        let ex = component_jets(&f, &x, 3).unwrap().remove(0);
        let fd = component_jets(&bb, &x, 3).unwrap().remove(0);
        let rel = |p: f64, q: f64| (p - q).abs() / p.abs().max(1.0);
        for (p, q) in ex.grad.iter().zip(&fd.grad) {
            prop_assert!(rel(*p, *q) < 1e-9);
        }
        for (p, q) in ex.hess.as_slice().iter().zip(fd.hess.as_slice()) {
            prop_assert!(rel(*p, *q) < 1e-8);
        }
        for (p, q) in ex.third.as_slice().iter().zip(fd.third.as_slice()) {
            prop_assert!(rel(*p, *q) < 1e-5);
        }
    }

    #[test]
    fn m_round_trips_through_text(v in prop::num::f64::NORMAL) {
        let m: MParam = v.to_string().parse().unwrap();
        prop_assert_eq!(m, MParam::Finite(v));
        prop_assert_eq!(m.to_string().parse::<MParam>().unwrap(), m);
    }
}
