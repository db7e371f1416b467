//! Levi-Civita curvature at a point, from a metric jet.
//!
//! # Index and sign convention
//!
//! With `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z` and
//! `R(∂_i, ∂_j)∂_k = R_ijk^l ∂_l`,
//!
//! ```text
//! R_ijk^l = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
//! R_ijkl  = g_km R_ijl^m          (= <R(∂_i,∂_j)∂_l, ∂_k>)
//! Ric_jk  = R_ijk^i              (equivalently R_ik = g^{jl} R_ijkl)
//! ```
//!
//! so `R_ijij > 0` on the round sphere and, for every scalar `f`,
//! `f_kji − f_kij = f^l R_lkji`, where `f_kji = ∇_i ∇_j ∇_k f` (derivative indices
//! are appended on the right).

use crate::error::Result;
use crate::jets::{inverse_metric_jet, MetricJet3, ScalarJet3};
use crate::tensor::{Matrix, Tensor};

/// Everything curvature-related at one point.
#[derive(Clone, Debug)]
pub struct CurvaturePack {
    pub metric: Matrix,
    pub inverse: Matrix,
    /// `gamma[[k, i, j]] = Γ^k_ij`
    pub gamma: Tensor<3>,
    /// `dgamma[[k, i, j, l]] = ∂_l Γ^k_ij`
    pub dgamma: Tensor<4>,
    /// Lowered `R_ijkl`.
    pub riemann: Tensor<4>,
    pub ricci: Matrix,
    pub scalar: f64,
    /// `∂_i R`
    pub grad_scalar: Vec<f64>,
    pub weyl: Tensor<4>,
    /// `grad_ricci[[i, j, k]] = R_ij,k` (covariant)
    pub grad_ricci: Tensor<3>,
}

impl CurvaturePack {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `f^i = g^{ij} f_j`
    pub fn raise(&self, v: &[f64]) -> Vec<f64> {
        self.inverse.mat_vec(v)
    }
}

pub fn curvature_pack(mj: &MetricJet3) -> Result<CurvaturePack> {
    let n = mj.dim();
    let inv = inverse_metric_jet(mj)?;
    let ginv = &inv.ginv;
    let dginv = &inv.dginv;

    // ∂_m ∂_p g^{kl}
    let mut d2ginv = Tensor::<4>::zeros(n);
    for m in 0..n {
        for p in m..n {
            // ∂_p(−G⁻¹ ∂_mG G⁻¹), with ∂_p G⁻¹ already known
            let dgm = Matrix::from_fn(n, |[a, b]| mj.dg[[a, b, m]]);
            let dgp_inv = Matrix::from_fn(n, |[a, b]| dginv[[a, b, p]]);
            let d2 = Matrix::from_fn(n, |[a, b]| mj.d2g[[a, b, m, p]]);
            let t1 = dgp_inv.matmul(&dgm).matmul(ginv);
            let t2 = ginv.matmul(&d2).matmul(ginv);
            let t3 = ginv.matmul(&dgm).matmul(&dgp_inv);
            for k in 0..n {
                for l in 0..n {
                    let v = -(t1[[k, l]] + t2[[k, l]] + t3[[k, l]]);
                    d2ginv[[k, l, m, p]] = v;
                    d2ginv[[k, l, p, m]] = v;
                }
            }
        }
    }

    // Christoffel symbols of the first kind and their partials:
    // c[[l, i, j]] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let c = Tensor::<3>::from_fn(n, |[l, i, j]| {
        0.5 * (mj.dg[[j, l, i]] + mj.dg[[i, l, j]] - mj.dg[[i, j, l]])
    });
    let dc = Tensor::<4>::from_fn(n, |[l, i, j, m]| {
        0.5 * (mj.d2g[[j, l, i, m]] + mj.d2g[[i, l, j, m]] - mj.d2g[[i, j, l, m]])
    });
    let d2c = Tensor::<5>::from_fn(n, |[l, i, j, m, p]| {
        0.5 * (mj.d3g[[j, l, i, m, p]] + mj.d3g[[i, l, j, m, p]] - mj.d3g[[i, j, l, m, p]])
    });

    let gamma = Tensor::<3>::from_fn(n, |[k, i, j]| {
        (0..n).map(|l| ginv[[k, l]] * c[[l, i, j]]).sum()
    });
    let dgamma = Tensor::<4>::from_fn(n, |[k, i, j, m]| {
        (0..n)
            .map(|l| dginv[[k, l, m]] * c[[l, i, j]] + ginv[[k, l]] * dc[[l, i, j, m]])
            .sum()
    });
    // d2gamma[[k, i, j, m, p]] = ∂_p ∂_m Γ^k_ij
    let d2gamma = Tensor::<5>::from_fn(n, |[k, i, j, m, p]| {
        (0..n)
            .map(|l| {
                d2ginv[[k, l, m, p]] * c[[l, i, j]]
                    + dginv[[k, l, m]] * dc[[l, i, j, p]]
                    + dginv[[k, l, p]] * dc[[l, i, j, m]]
                    + ginv[[k, l]] * d2c[[l, i, j, m, p]]
            })
            .sum()
    });

    // rup[[i, j, k, l]] = R_ijk^l
    let rup = Tensor::<4>::from_fn(n, |[i, j, k, l]| {
        let mut v = dgamma[[l, j, k, i]] - dgamma[[l, i, k, j]];
        for m in 0..n {
            v += gamma[[l, i, m]] * gamma[[m, j, k]] - gamma[[l, j, m]] * gamma[[m, i, k]];
        }
        v
    });
    let riemann = Tensor::<4>::from_fn(n, |[i, j, k, l]| {
        (0..n).map(|m| mj.g[[k, m]] * rup[[i, j, l, m]]).sum()
    });

    let ricci = Matrix::from_fn(n, |[j, k]| (0..n).map(|i| rup[[i, j, k, i]]).sum());
    // dricci[[j, k, p]] = ∂_p Ric_jk
    let dricci = Tensor::<3>::from_fn(n, |[j, k, p]| {
        let mut v = 0.0;
        for i in 0..n {
            v += d2gamma[[i, j, k, i, p]] - d2gamma[[i, i, k, j, p]];
            for m in 0..n {
                v += dgamma[[i, i, m, p]] * gamma[[m, j, k]]
                    + gamma[[i, i, m]] * dgamma[[m, j, k, p]]
                    - dgamma[[i, j, m, p]] * gamma[[m, i, k]]
                    - gamma[[i, j, m]] * dgamma[[m, i, k, p]];
            }
        }
        v
    });

    let mut scalar = 0.0;
    for j in 0..n {
        for k in 0..n {
            scalar += ginv[[j, k]] * ricci[[j, k]];
        }
    }
    let grad_scalar: Vec<f64> = (0..n)
        .map(|p| {
            let mut v = 0.0;
            for j in 0..n {
                for k in 0..n {
                    v += dginv[[j, k, p]] * ricci[[j, k]] + ginv[[j, k]] * dricci[[j, k, p]];
                }
            }
            v
        })
        .collect();

    let grad_ricci = Tensor::<3>::from_fn(n, |[i, j, k]| {
        let mut v = dricci[[i, j, k]];
        for m in 0..n {
            v -= gamma[[m, k, i]] * ricci[[m, j]] + gamma[[m, k, j]] * ricci[[i, m]];
        }
        v
    });

    let weyl = weyl_from(&riemann, &ricci, scalar, &mj.g);

    Ok(CurvaturePack {
        metric: mj.g.clone(),
        inverse: ginv.clone(),
        gamma,
        dgamma,
        riemann,
        ricci,
        scalar,
        grad_scalar,
        weyl,
        grad_ricci,
    })
}

/// `(g^{-1}, Γ^k_ij)` from the metric and its first partials only.
pub fn christoffel(mj: &MetricJet3) -> Result<(Matrix, Tensor<3>)> {
    let n = mj.dim();
    let ginv = inverse_metric_jet(mj)?.ginv;
    let c = Tensor::<3>::from_fn(n, |[l, i, j]| {
        0.5 * (mj.dg[[j, l, i]] + mj.dg[[i, l, j]] - mj.dg[[i, j, l]])
    });
    let gamma = Tensor::<3>::from_fn(n, |[k, i, j]| {
        (0..n).map(|l| ginv[[k, l]] * c[[l, i, j]]).sum()
    });
    Ok((ginv, gamma))
}

/// `W_ijkl = R_ijkl − (R_ik g_jl − R_il g_jk + R_jl g_ik − R_jk g_il)/(n−2)
///          + R (g_ik g_jl − g_il g_jk)/((n−1)(n−2))`
pub fn weyl_from(riemann: &Tensor<4>, ricci: &Matrix, scalar: f64, g: &Matrix) -> Tensor<4> {
    let n = g.dim();
    let nf = n as f64;
    let a = 1.0 / (nf - 2.0);
    let b = scalar / ((nf - 1.0) * (nf - 2.0));
    Tensor::<4>::from_fn(n, |[i, j, k, l]| {
        riemann[[i, j, k, l]]
            - a * (ricci[[i, k]] * g[[j, l]] - ricci[[i, l]] * g[[j, k]]
                + ricci[[j, l]] * g[[i, k]]
                - ricci[[j, k]] * g[[i, l]])
            + b * (g[[i, k]] * g[[j, l]] - g[[i, l]] * g[[j, k]])
    })
}

/// `f_ij = ∂_i ∂_j f − Γ^k_ij ∂_k f`
pub fn covariant_hessian(sj: &ScalarJet3, cp: &CurvaturePack) -> Matrix {
    let n = cp.dim();
    Matrix::from_fn(n, |[i, j]| {
        sj.hess[[i, j]]
            - (0..n)
                .map(|k| cp.gamma[[k, i, j]] * sj.grad[k])
                .sum::<f64>()
    })
}

/// Covariant third derivative, `out[[k, j, i]] = f_kji = (∇_i ∇²f)_kj`.
pub fn third_covariant_scalar(sj: &ScalarJet3, cp: &CurvaturePack) -> Tensor<3> {
    let n = cp.dim();
    let hess = covariant_hessian(sj, cp);
    Tensor::<3>::from_fn(n, |[k, j, i]| {
        // ∂_i f_kj
        let mut v = sj.third[[i, k, j]];
        for m in 0..n {
            v -= cp.dgamma[[m, k, j, i]] * sj.grad[m] + cp.gamma[[m, k, j]] * sj.hess[[i, m]];
        }
        for m in 0..n {
            v -= cp.gamma[[m, i, k]] * hess[[m, j]] + cp.gamma[[m, i, j]] * hess[[k, m]];
        }
        v
    })
}

/// `max_{ijk} |f_kji − f_kij − f^l R_lkji|`
pub fn ricci_identity_residual(sj: &ScalarJet3, cp: &CurvaturePack) -> f64 {
    let n = cp.dim();
    let t = third_covariant_scalar(sj, cp);
    let up = cp.raise(&sj.grad);
    let mut worst = 0.0f64;
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let rhs: f64 = (0..n).map(|l| up[l] * cp.riemann[[l, k, j, i]]).sum();
                worst = worst.max((t[[k, j, i]] - t[[k, i, j]] - rhs).abs());
            }
        }
    }
    worst
}

/// Largest violation among the algebraic symmetries of `R_ijkl`
/// (both antisymmetries, pair symmetry, first Bianchi).
pub fn riemann_symmetry_residual(r: &Tensor<4>) -> f64 {
    let mut m = 0.0f64;
    for [i, j, k, l] in r.indices() {
        let v = r[[i, j, k, l]];
        m = m.max((v + r[[j, i, k, l]]).abs());
        m = m.max((v + r[[i, j, l, k]]).abs());
        m = m.max((v - r[[k, l, i, j]]).abs());
        m = m.max((v + r[[i, k, l, j]] + r[[i, l, j, k]]).abs());
    }
    m
}

/// Largest of the six single metric traces of a 4-tensor.
pub fn max_single_trace(t: &Tensor<4>, ginv: &Matrix) -> f64 {
    let n = ginv.dim();
    let mut m = 0.0f64;
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for &(a, b) in &pairs {
        for x in 0..n {
            for y in 0..n {
                let mut s = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        let mut idx = [0usize; 4];
                        idx[a] = p;
                        idx[b] = q;
                        let mut rest = [x, y].into_iter();
                        for (slot, v) in idx.iter_mut().enumerate() {
                            if slot != a && slot != b {
                                *v = rest.next().unwrap_or(0);
                            }
                        }
                        s += ginv[[p, q]] * t[idx];
                    }
                }
                m = m.max(s.abs());
            }
        }
    }
    m
}

/// `max_j |g^{ik} R_ij,k − ½ ∂_j R|`
pub fn contracted_bianchi_residual(cp: &CurvaturePack) -> f64 {
    let n = cp.dim();
    (0..n)
        .map(|j| {
            let mut div = 0.0;
            for i in 0..n {
                for k in 0..n {
                    div += cp.inverse[[i, k]] * cp.grad_ricci[[i, j, k]];
                }
            }
            (div - 0.5 * cp.grad_scalar[j]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{
        evaluate_metric_jet, evaluate_scalar_jet, CatalogField, Expr, FieldSpec, Point,
    };

    fn pack(f: &FieldSpec, p: &[f64]) -> CurvaturePack {
        curvature_pack(&evaluate_metric_jet(f, &Point::new(p.to_vec()).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn flat_is_flat() {
        let cp = pack(
            &FieldSpec::catalog(CatalogField::Flat { dim: 3 }),
            &[0.1, 0.2, 0.3],
        );
        assert_eq!(cp.riemann.max_abs(), 0.0);
        assert_eq!(cp.scalar, 0.0);
        assert_eq!(cp.weyl.max_abs(), 0.0);
        assert_eq!(cp.gamma.max_abs(), 0.0);
    }

    #[test]
    fn round_sphere_radius_two() {
        let f = FieldSpec::catalog(CatalogField::Sphere {
            dim: 3,
            radius: 2.0,
        });
        for p in [[0.0, 0.0, 0.0], [0.3, -0.5, 0.7], [-0.9, 0.2, 0.1]] {
            let cp = pack(&f, &p);
            assert!((cp.scalar - 1.5).abs() < 1e-12, "R = {}", cp.scalar);
            assert!(cp.grad_scalar.iter().all(|v| v.abs() < 1e-12));
            // R_ijkl = (g_ik g_jl − g_il g_jk)/r0²
            let g = &cp.metric;
            let want = Tensor::<4>::from_fn(3, |[i, j, k, l]| {
                (g[[i, k]] * g[[j, l]] - g[[i, l]] * g[[j, k]]) / 4.0
            });
            assert!(cp.riemann.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_half_space() {
        let f = FieldSpec::catalog(CatalogField::Hyperbolic { dim: 3 });
        let cp = pack(&f, &[0.2, -0.4, 0.7]);
        assert!((cp.scalar + 6.0).abs() < 1e-11);
    }

    #[test]
    fn ricci_is_trace_of_lowered_riemann() {
        let f = FieldSpec::catalog(CatalogField::random_poly(4, 3, 0.05));
        let cp = pack(&f, &[0.2, -0.1, 0.4, 0.3]);
        let n = 4;
        let r2 = Matrix::from_fn(n, |[i, k]| {
            let mut s = 0.0;
            for j in 0..n {
                for l in 0..n {
                    s += cp.inverse[[j, l]] * cp.riemann[[i, j, k, l]];
                }
            }
            s
        });
        assert!(r2.max_abs_diff(&cp.ricci) < 1e-13);
        assert!(cp.ricci.asymmetry() < 1e-13);
        assert!(riemann_symmetry_residual(&cp.riemann) < 1e-12);
        assert!(contracted_bianchi_residual(&cp) < 1e-10);
    }

    #[test]
    fn conformally_flat_four_has_no_weyl() {
        let f = FieldSpec::catalog(CatalogField::Conformal {
            base: Box::new(CatalogField::Flat { dim: 4 }),
            u: Expr::parse("0.3*sin(x1)*cos(x2)").unwrap(),
        });
        let cp = pack(&f, &[0.3, 0.6, -0.2, 0.1]);
        assert!(cp.weyl.max_abs() < 1e-12);
        assert!(cp.riemann.max_abs() > 1e-3);
    }

    #[test]
    fn covariant_hessian_of_half_radius_squared_is_metric() {
        let g = FieldSpec::catalog(CatalogField::PolarFlat { dim: 3 });
        let f = FieldSpec::scalar_expr(3, "x1*x1/2")
            .unwrap()
            .with_domain(g.domain.clone());
        let p = Point::new(vec![1.7, 0.9, 0.4]).unwrap();
        let cp = curvature_pack(&evaluate_metric_jet(&g, &p).unwrap()).unwrap();
        let h = covariant_hessian(&evaluate_scalar_jet(&f, &p).unwrap(), &cp);
        assert!(h.max_abs_diff(&cp.metric) < 1e-13);
    }

    #[test]
    fn third_covariant_matches_plain_partials_when_flat() {
        let g = FieldSpec::catalog(CatalogField::Flat { dim: 3 });
        let f = FieldSpec::scalar_expr(3, "x1^3*x2 - 2*x2*x3^2 + x1*x2*x3").unwrap();
        let p = Point::new(vec![0.4, -0.3, 0.8]).unwrap();
        let cp = curvature_pack(&evaluate_metric_jet(&g, &p).unwrap()).unwrap();
        let sj = evaluate_scalar_jet(&f, &p).unwrap();
        let t = third_covariant_scalar(&sj, &cp);
        assert!(t.max_abs_diff(&sj.third) < 1e-15);
    }
}
