//! Engine output against closed forms worked out by hand.

use yamabe_core::catalog::{self, CatalogOptions};
use yamabe_core::construct::profile::{integrate_profile, profile_to_instance};
use yamabe_core::curvature::curvature_pack;
use yamabe_core::jets::{evaluate_metric_jet, CatalogField, Expr, FieldSpec, Point};
use yamabe_core::levelset::level_set_report;
use yamabe_core::soliton::{
    evaluate_point, soliton_residual, weighted_l, MParam, SolitonInstance, SolitonParams,
};

fn pt(x: &[f64]) -> Point {
    Point::new(x.to_vec()).unwrap()
}

fn pack(c: CatalogField, x: &[f64]) -> yamabe_core::curvature::CurvaturePack {
    curvature_pack(&evaluate_metric_jet(&FieldSpec::catalog(c), &pt(x)).unwrap()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn round_spheres_have_constant_curvature() {
    for (n, a) in [(3, 1.0), (4, 0.7), (5, 2.0)] {
        for c in [
            CatalogField::Sphere { dim: n, radius: a },
            CatalogField::SpherePolar { dim: n, radius: a },
        ] {
            let x: Vec<f64> = (0..n).map(|i| 0.4 + 0.1 * i as f64).collect();
            let cp = pack(c, &x);
            let r = (n * (n - 1)) as f64 / (a * a);
            assert!(close(cp.scalar, r, 1e-12), "n={n}: {} vs {r}", cp.scalar);
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    let area = cp.metric[[i, i]] * cp.metric[[j, j]] - cp.metric[[i, j]].powi(2);
                    let k = cp.riemann[[i, j, i, j]] / area;
                    assert!(close(k, 1.0 / (a * a), 1e-11), "K({i},{j}) = {k}");
                }
            }
            assert!(cp.weyl.max_abs() < 1e-11);
        }
    }
}

#[test]
fn hyperbolic_space() {
    for n in [3, 4] {
        let mut x = vec![0.2; n];
        x[n - 1] = 0.9;
        let cp = pack(CatalogField::Hyperbolic { dim: n }, &x);
        assert!(close(cp.scalar, -((n * (n - 1)) as f64), 1e-12));
        for i in 0..n {
            for j in 0..n {
                assert!(close(
                    cp.ricci[[i, j]],
                    -((n - 1) as f64) * cp.metric[[i, j]],
                    1e-12
                ));
            }
        }
    }
}

/// `R = −e^{−2u} (2(n−1) Δu + (n−2)(n−1)|∇u|²)` for `e^{2u} δ`.
#[test]
fn conformally_flat_scalar_curvature() {
    let (x1, x2) = (0.3, -0.5);
    let u = 0.3 * f64::sin(x1) * f64::cos(x2);
    let du = [
        0.3 * x1.cos() * x2.cos(),
        -0.3 * x1.sin() * x2.sin(),
        0.0,
        0.0,
    ];
    let lap = -2.0 * u;
    let grad2: f64 = du.iter().map(|v| v * v).sum();
    let n = 4.0;
    let want = -(-2.0 * u).exp() * (2.0 * (n - 1.0) * lap + (n - 2.0) * (n - 1.0) * grad2);
    let inst = catalog::instance("CONF4", &CatalogOptions::default()).unwrap();
    let pe = evaluate_point(&inst, &pt(&[x1, x2, 0.1, 0.2])).unwrap();
    assert!(
        close(pe.cp.scalar, want, 1e-12),
        "{} vs {want}",
        pe.cp.scalar
    );
    assert!(pe.cp.weyl.max_abs() < 1e-12);
}

/// `W(e^{2u} g) = e^{2u} W(g)` in the all-lower form.
#[test]
fn weyl_is_conformally_covariant() {
    let base = CatalogField::random_poly(4, 21, catalog::RANDOM_EPS);
    let u_src = "0.2*x1*x2 + 0.1*sin(x3) - 0.15*x4*x4";
    let conf = CatalogField::Conformal {
        base: Box::new(base.clone()),
        u: Expr::parse(u_src).unwrap(),
    };
    for x in [
        [0.1, 0.2, -0.3, 0.4],
        [-0.5, 0.6, 0.2, -0.1],
        [0.7, -0.7, 0.5, 0.3],
    ] {
        let w = pack(base.clone(), &x).weyl;
        let wc = pack(conf.clone(), &x).weyl;
        let u = 0.2 * x[0] * x[1] + 0.1 * x[2].sin() - 0.15 * x[3] * x[3];
        let scaled = w.map(|v| v * (2.0 * u).exp());
        let diff = wc.max_abs_diff(&scaled);
        assert!(
            diff < 1e-11 * w.max_abs().max(1e-3),
            "{diff:e} vs |W| = {:e}",
            w.max_abs()
        );
        assert!(
            w.max_abs() > 1e-4,
            "Weyl should not vanish for a generic metric"
        );
    }
}

#[test]
fn product_sphere_plane() {
    let cp = pack(
        CatalogField::SphereProduct {
            sphere_dim: 2,
            flat_dim: 2,
        },
        &[0.3, -0.2, 0.5, 0.1],
    );
    assert!(close(cp.scalar, 2.0, 1e-12));
    for i in 0..4 {
        for j in 0..4 {
            let want = if i < 2 { cp.metric[[i, j]] } else { 0.0 };
            assert!((cp.ricci[[i, j]] - if j < 2 { want } else { 0.0 }).abs() < 1e-12);
        }
    }
}

/// Flat space with `f = (λ/2)|x|²` and `m = ∞` is a soliton exactly when `ρ = −λ`.
#[test]
fn gaussian_soliton() {
    let metric = FieldSpec::catalog(CatalogField::Flat { dim: 3 });
    let f = FieldSpec::scalar_expr(3, "1.5*(x1*x1 + x2*x2 + x3*x3)").unwrap();
    let on = SolitonInstance::new(
        "g",
        metric.clone(),
        f.clone(),
        SolitonParams::new(MParam::Infinity, -3.0).unwrap(),
    )
    .unwrap();
    let off = SolitonInstance::new(
        "g",
        metric,
        f,
        SolitonParams::new(MParam::Infinity, 0.0).unwrap(),
    )
    .unwrap();
    let p = pt(&[0.2, 0.3, -0.4]);
    assert_eq!(soliton_residual(&on, &p).unwrap().max_abs(), 0.0);
    assert!(close(
        soliton_residual(&off, &p).unwrap().max_abs(),
        3.0,
        1e-14
    ));
}

/// `L(u) = Δu − (1/m)<∇f, ∇u>` on flat space.
#[test]
fn weighted_operator_on_flat_space() {
    let metric = FieldSpec::catalog(CatalogField::Flat { dim: 3 });
    let f = FieldSpec::scalar_expr(3, "x1*x2").unwrap();
    let inst = SolitonInstance::new(
        "l",
        metric,
        f,
        SolitonParams::new(MParam::Finite(4.0), 0.0).unwrap(),
    )
    .unwrap();
    let u = FieldSpec::scalar_expr(3, "x1*x1 + sin(x3)").unwrap();
    let (a, b, c) = (0.3, -0.2, 0.7);
    // Δu = 2 − sin x3, ∇f = (x2, x1, 0), ∇u = (2 x1, 0, cos x3)
    let want = 2.0 - f64::sin(c) - 0.25 * (b * 2.0 * a);
    let got = weighted_l(&inst, &u, &pt(&[a, b, c])).unwrap();
    assert!(close(got, want, 1e-14), "{got} vs {want}");
}

/// On a warped product the levels of `f(r)` are the spheres `r = const`:
/// `|∇f|² = f'²`, `H = ±(n−1)φ'/φ`, intrinsic curvature `1/φ²`,
/// and `R = ρ + φ'f'/φ`.
#[test]
fn warped_product_level_geometry() {
    for n in [3, 4, 5] {
        let pr = integrate_profile(n, MParam::Finite(1.0), 1.0, 0.5, 1.5, 1e-3).unwrap();
        let inst = profile_to_instance(&pr).unwrap();
        for k in [300, 700, 1100] {
            let r = pr.grid[k];
            let mut x = vec![1.2; n];
            x[0] = r;
            x[n - 1] = 0.4;
            let rep = level_set_report(&inst, &pt(&x)).unwrap();
            let (phi, dphi, df) = (pr.phi[k], pr.dphi[k], pr.df[k]);
            let nf = n as f64;
            assert!(close(rep.grad_norm * rep.grad_norm, df * df, 1e-9));
            assert!(close(
                rep.mean_curvature,
                df.signum() * (nf - 1.0) * dphi / phi,
                1e-8
            ));
            for s in &rep.sect {
                assert!(
                    close(s.value, 1.0 / (phi * phi), 1e-8),
                    "n={n} r={r}: {} vs {}",
                    s.value,
                    1.0 / (phi * phi)
                );
            }
            assert!(close(rep.scalar, 1.0 + dphi * df / phi, 1e-8));
        }
    }
}

/// A sphere `|x| = ρ0` in flat space: `H = 2/ρ0`, intrinsic curvature `1/ρ0²`.
#[test]
fn euclidean_sphere_levels() {
    let inst = catalog::instance(
        "FLAT3",
        &CatalogOptions {
            potential: Some("x1*x1 + x2*x2 + x3*x3".into()),
            ..Default::default()
        },
    )
    .unwrap();
    let x = [0.3, -0.4, 0.5];
    let r = (0.5f64).sqrt();
    let rep = level_set_report(&inst, &pt(&x)).unwrap();
    assert!(close(rep.mean_curvature, 2.0 / r, 1e-13));
    assert!(close(rep.sect[0].value, 1.0 / (r * r), 1e-13));
    assert!(rep.h_isotropy < 1e-13);
}

/// The stored curvature column agrees with the full engine away from the center.
#[test]
fn profile_curvature_column_matches_engine() {
    let pr = integrate_profile(4, MParam::Finite(-1.0), 0.0, 0.5, 1.5, 1e-3).unwrap();
    let inst = profile_to_instance(&pr).unwrap();
    for k in [200, 600, 1000, 1400] {
        let x = [pr.grid[k], 1.0, 2.0, -0.5];
        let s = evaluate_point(&inst, &pt(&x)).unwrap().cp.scalar;
        assert!(close(s, pr.scalar_r[k], 1e-8), "{s} vs {}", pr.scalar_r[k]);
    }
}
