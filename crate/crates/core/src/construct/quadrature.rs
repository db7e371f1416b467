//! Product Gauss–Legendre quadrature on the unit round sphere `S^n` and the
//! weighted integration-by-parts identities for `L(u) = Δu − (1/m)<∇f, ∇u>`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::christoffel;
use crate::error::{Error, Result};
use crate::jets::{
    evaluate_metric_jet_to, evaluate_scalar_jet_to, CatalogField, FieldSpec, Point, ScalarJet3,
};
use crate::soliton::MParam;
use crate::tensor::{Matrix, Tensor};

/// Nodes and weights of the `k`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=k {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            if k == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = kf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[k - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[k - 1 - i] = w[i];
    }
    (x, w)
}

/// Hyperspherical product grid on the unit `S^n`: coordinates
/// `(χ_1, …, χ_{n−1}) ∈ [0, π]`, `ψ ∈ [−π, π]`; `weights` include the volume
/// Jacobian `Π_k sin^{n−1−k} χ_k`.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub dim: usize,
    pub resolution: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn sphere(dim: usize, resolution: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParameter(format!("dimension {dim} < 3")));
        }
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "resolution {resolution} < 2"
            )));
        }
        let (x, w) = gauss_legendre(resolution);
        let total = resolution.pow(dim as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut p = Vec::with_capacity(dim);
            let mut wt = 1.0;
            for (axis, &i) in idx.iter().enumerate() {
                if axis + 1 < dim {
                    let c = 0.5 * PI * (x[i] + 1.0);
                    wt *= 0.5 * PI * w[i] * c.sin().powi((dim - 1 - axis) as i32);
                    p.push(c);
                } else {
                    p.push(PI * x[i]);
                    wt *= PI * w[i];
                }
            }
            points.push(p);
            weights.push(wt);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < resolution {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(Self {
            dim,
            resolution,
            points,
            weights,
        })
    }

    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Metric of the unit sphere in the grid's chart.
    pub fn metric(&self) -> FieldSpec {
        FieldSpec::catalog(CatalogField::SpherePolar {
            dim: self.dim,
            radius: 1.0,
        })
    }
}

/// Volume of the unit round `S^n`: `2 π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    // recursion Vol(S^n) = 2π/(n−1) · Vol(S^{n−2})
    let (mut v, mut k) = if n.is_multiple_of(2) {
        (2.0, 0)
    } else {
        (2.0 * PI, 1)
    };
    while k < n {
        k += 2;
        v *= 2.0 * PI / (k as f64 - 1.0);
    }
    v
}

/// The three integral identities at one resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub resolution: usize,
    /// `|∫ v L(u) dμ − ∫ u L(v) dμ|`
    pub self_adjoint: f64,
    /// `|∫ v L(u) dμ + ∫ <∇u, ∇v> dμ|`
    pub by_parts: f64,
    /// `|∫ L(u) dμ|`
    pub total_l: f64,
}

impl QuadratureResult {
    pub fn max(&self) -> f64 {
        self.self_adjoint.max(self.by_parts).max(self.total_l)
    }
}

fn laplace_terms(ginv: &Matrix, gamma: &Tensor<3>, u: &ScalarJet3) -> f64 {
    let n = ginv.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let cov = u.hess[[i, j]] - (0..n).map(|k| gamma[[k, i, j]] * u.grad[k]).sum::<f64>();
            s += ginv[[i, j]] * cov;
        }
    }
    s
}

/// Evaluate the integral identities with measure `e^{−f/m} dV` on the unit
/// `S^n` by product Gauss–Legendre quadrature with `resolution` nodes per angle.
pub fn weighted_quadrature_check(
    n: usize,
    f: &FieldSpec,
    u: &FieldSpec,
    v: &FieldSpec,
    m: MParam,
    resolution: usize,
) -> Result<QuadratureResult> {
    let grid = QuadratureGrid::sphere(n, resolution)?;
    for (name, fs) in [("f", f), ("u", u), ("v", v)] {
        if fs.dim() != n || fs.components() != 1 {
            return Err(Error::Shape(format!(
                "{name} must be a scalar field in dimension {n}"
            )));
        }
    }
    let metric = grid.metric();
    // the fields are taken to live on the sphere chart, whatever box they were declared with
    let chart = metric.domain.clone();
    let (f, u, v) = (
        &f.clone().with_domain(chart.clone()),
        &u.clone().with_domain(chart.clone()),
        &v.clone().with_domain(chart),
    );
    let inv_m = m.inv();
    let sums = grid
        .points
        .par_iter()
        .zip(grid.weights.par_iter())
        .map(|(x, &w)| -> Result<[f64; 4]> {
            let p = Point::new(x.clone())?;
            let mj = evaluate_metric_jet_to(&metric, &p, 1)?;
            let (ginv, gamma) = christoffel(&mj)?;
            let fj = evaluate_scalar_jet_to(f, &p, 1)?;
            let uj = evaluate_scalar_jet_to(u, &p, 2)?;
            let vj = evaluate_scalar_jet_to(v, &p, 2)?;
            let l = |a: &ScalarJet3| {
                laplace_terms(&ginv, &gamma, a) - inv_m * ginv.bilinear(&fj.grad, &a.grad)
            };
            let lu = l(&uj);
            let lv = l(&vj);
            let dmu = w * (-inv_m * fj.value).exp();
            Ok([
                dmu * vj.value * lu,
                dmu * uj.value * lv,
                dmu * ginv.bilinear(&uj.grad, &vj.grad),
                dmu * lu,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    // fixed-order summation keeps results independent of the thread count
    let mut acc = [0.0f64; 4];
    for s in &sums {
        for (a, b) in acc.iter_mut().zip(s) {
            *a += b;
        }
    }
    let [vlu, ulv, grad, lu] = acc;
    Ok(QuadratureResult {
        resolution,
        self_adjoint: (vlu - ulv).abs(),
        by_parts: (vlu + grad).abs(),
        total_l: lu.abs(),
    })
}

/// Results at successive doublings of the resolution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureConvergence {
    pub levels: Vec<QuadratureResult>,
}

impl QuadratureConvergence {
    /// Every doubling shrinks each identity by at least 16× (fourth order),
    /// unless it is already below `floor`.
    pub fn fourth_order(&self, floor: f64) -> bool {
        self.levels.windows(2).all(|w| {
            let ok = |a: f64, b: f64| b <= floor || b <= a / 16.0;
            ok(w[0].self_adjoint, w[1].self_adjoint)
                && ok(w[0].by_parts, w[1].by_parts)
                && ok(w[0].total_l, w[1].total_l)
        })
    }
}

pub fn quadrature_convergence(
    n: usize,
    f: &FieldSpec,
    u: &FieldSpec,
    v: &FieldSpec,
    m: MParam,
    resolutions: &[usize],
) -> Result<QuadratureConvergence> {
    let levels = resolutions
        .iter()
        .map(|&r| weighted_quadrature_check(n, f, u, v, m, r))
        .collect::<Result<_>>()?;
    Ok(QuadratureConvergence { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m8 - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-12);
        let g = QuadratureGrid::sphere(3, 24).unwrap();
        assert!((g.volume() / sphere_volume(3) - 1.0).abs() < 1e-12);
        let g4 = QuadratureGrid::sphere(4, 12).unwrap();
        assert!((g4.volume() / sphere_volume(4) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn constant_test_function_is_trivial() {
        let f = FieldSpec::scalar_expr(3, "cos(x1)").unwrap();
        let one = FieldSpec::scalar_expr(3, "1").unwrap();
        let v = FieldSpec::scalar_expr(3, "cos(x1)").unwrap();
        let r = weighted_quadrature_check(3, &f, &one, &v, MParam::Finite(2.0), 16).unwrap();
        assert!(r.max() < 1e-13, "{r:?}");
    }
}
