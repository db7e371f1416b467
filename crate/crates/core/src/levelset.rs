//! Geometry of the level surfaces `{f = c}` in the adapted frame
//! `e_1 = ∇f/|∇f|`, `e_2 … e_n` tangent.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{evaluate_scalar_jet_to, Point};
use crate::soliton::{evaluate_point, PointEval, ResidualReport, SolitonInstance};
use crate::tensor::{Matrix, Tensor};

/// g-orthonormal frame; `vectors[i]` holds the chart components of `e_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptedFrame {
    pub vectors: Vec<Vec<f64>>,
    /// Coordinate direction left out of the Gram–Schmidt completion.
    pub skipped: usize,
}

impl AdaptedFrame {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// `T(e_a, e_b)`
    pub fn components2(&self, t: &Matrix) -> Matrix {
        let n = self.dim();
        let e = &self.vectors;
        Matrix::from_fn(n, |[a, b]| t.bilinear(&e[a], &e[b]))
    }

    /// `T(e_a, e_b, e_c, e_d)`
    pub fn components4(&self, t: &Tensor<4>) -> Tensor<4> {
        let n = self.dim();
        let e = &self.vectors;
        let mut cur = t.clone();
        for slot in 0..4 {
            cur = Tensor::<4>::from_fn(n, |idx| {
                (0..n)
                    .map(|p| {
                        let mut j = idx;
                        j[slot] = p;
                        e[idx[slot]][p] * cur[j]
                    })
                    .sum()
            });
        }
        cur
    }

    /// `max |g(e_a, e_b) − δ_ab|`
    pub fn orthonormality_defect(&self, g: &Matrix) -> f64 {
        let gram = self.components2(g);
        gram.indices()
            .map(|[a, b]| (gram[[a, b]] - if a == b { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }
}

/// Gram–Schmidt (two passes) over `∇f/|∇f|` and the coordinate basis, dropping
/// the coordinate vector with the largest normalized `|g(e_1, ∂_i)|`.
pub fn adapted_frame_at(pe: &PointEval) -> Result<AdaptedFrame> {
    pe.require_regular()?;
    let n = pe.dim();
    let g = &pe.cp.metric;
    let norm = pe.grad_norm();
    let e1: Vec<f64> = pe.grad_up.iter().map(|v| v / norm).collect();
    let skipped = (0..n)
        .map(|i| {
            let cos = (0..n).map(|k| g[[i, k]] * e1[k]).sum::<f64>().abs() / g[[i, i]].sqrt();
            (i, cos)
        })
        .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best })
        .0;
    let mut vectors = vec![e1];
    for i in (0..n).filter(|&i| i != skipped) {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for _ in 0..2 {
            for u in &vectors {
                let c = g.bilinear(&v, u);
                for (a, b) in v.iter_mut().zip(u) {
                    *a -= c * b;
                }
            }
        }
        let len = g.bilinear(&v, &v).sqrt();
        if !(len > 1e-12) {
            return Err(Error::Shape(format!(
                "degenerate frame completion at {:?}",
                pe.point.coords()
            )));
        }
        v.iter_mut().for_each(|x| *x /= len);
        vectors.push(v);
    }
    Ok(AdaptedFrame { vectors, skipped })
}

pub fn adapted_frame(inst: &SolitonInstance, p: &Point) -> Result<AdaptedFrame> {
    adapted_frame_at(&evaluate_point(inst, p)?)
}

/// Sectional curvature of the level surface on the plane `(e_a, e_b)`,
/// frame indices counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelSectional {
    pub a: usize,
    pub b: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub point: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub scalar: f64,
    pub r_rho: f64,
    /// `h_ab = f_ab/|∇f|` over tangent frame vectors
    pub h: Matrix,
    pub mean_curvature: f64,
    /// `(n−1) R_ρ / |∇f|`
    pub mean_curvature_predicted: f64,
    /// `max |h_ab − H/(n−1) δ_ab|`
    pub h_isotropy: f64,
    /// `R_1a`, `a = 2 … n`
    pub ric_mixed: Vec<f64>,
    /// `max |R_ab − μ δ_ab|`
    pub ric_tangent_dev: f64,
    /// `R_11`
    pub lambda: f64,
    /// `(R − R_11)/(n−1)`
    pub mu: f64,
    pub sect: Vec<LevelSectional>,
    /// `R/2 − R_11 + R_ρ²/|∇f|²` (three-dimensional closed form)
    pub sect_closed_form: Option<f64>,
}

impl LevelSetReport {
    pub fn ric_mixed_max(&self) -> f64 {
        self.ric_mixed.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn sect_spread(&self) -> f64 {
        spread(self.sect.iter().map(|s| s.value))
    }
}

pub fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        0.0
    } else {
        hi - lo
    }
}

pub fn level_set_report_at(pe: &PointEval) -> Result<LevelSetReport> {
    let frame = adapted_frame_at(pe)?;
    let n = pe.dim();
    let nf = n as f64;
    let gn = pe.grad_norm();
    let hess = frame.components2(&pe.hess);
    let h = Matrix::from_fn(n - 1, |[a, b]| hess[[a + 1, b + 1]] / gn);
    let mean = h.trace();
    let iso = mean / (nf - 1.0);
    let h_isotropy = h
        .indices()
        .map(|[a, b]| (h[[a, b]] - if a == b { iso } else { 0.0 }).abs())
        .fold(0.0, f64::max);

    let ric = frame.components2(&pe.cp.ricci);
    let lambda = ric[[0, 0]];
    let mu = (pe.cp.scalar - lambda) / (nf - 1.0);
    let ric_mixed = (1..n).map(|a| ric[[0, a]]).collect();
    let mut ric_tangent_dev = 0.0f64;
    for a in 1..n {
        for b in 1..n {
            let v = ric[[a, b]] - if a == b { mu } else { 0.0 };
            ric_tangent_dev = ric_tangent_dev.max(v.abs());
        }
    }

    let riem = frame.components4(&pe.cp.riemann);
    let mut sect = Vec::new();
    for a in 1..n {
        for b in a + 1..n {
            let (x, y) = (a - 1, b - 1);
            let value = riem[[a, b, a, b]] + h[[x, x]] * h[[y, y]] - h[[x, y]] * h[[x, y]];
            sect.push(LevelSectional {
                a: a + 1,
                b: b + 1,
                value,
            });
        }
    }
    let r_rho = pe.r_rho();
    let sect_closed_form =
        (n == 3).then(|| pe.cp.scalar / 2.0 - lambda + r_rho * r_rho / pe.grad_norm2);

    Ok(LevelSetReport {
        point: pe.point.coords().to_vec(),
        f: pe.f.value,
        grad_norm: gn,
        scalar: pe.cp.scalar,
        r_rho,
        h,
        mean_curvature: mean,
        mean_curvature_predicted: (nf - 1.0) * r_rho / gn,
        h_isotropy,
        ric_mixed,
        ric_tangent_dev,
        lambda,
        mu,
        sect,
        sect_closed_form,
    })
}

pub fn level_set_report(inst: &SolitonInstance, p: &Point) -> Result<LevelSetReport> {
    level_set_report_at(&evaluate_point(inst, p)?)
}

/// Second fundamental form and mean curvature.
pub fn second_fundamental_form(inst: &SolitonInstance, p: &Point) -> Result<(Matrix, f64)> {
    let r = level_set_report(inst, p)?;
    Ok((r.h, r.mean_curvature))
}

/// Ricci structure in the adapted frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciEigenstructure {
    pub ric_mixed: Vec<f64>,
    pub ric_tangent_dev: f64,
    pub lambda: f64,
    pub mu: f64,
}

pub fn ricci_eigenstructure(inst: &SolitonInstance, p: &Point) -> Result<RicciEigenstructure> {
    let r = level_set_report(inst, p)?;
    Ok(RicciEigenstructure {
        ric_mixed: r.ric_mixed,
        ric_tangent_dev: r.ric_tangent_dev,
        lambda: r.lambda,
        mu: r.mu,
    })
}

pub fn level_sectional(inst: &SolitonInstance, p: &Point) -> Result<Vec<LevelSectional>> {
    Ok(level_set_report(inst, p)?.sect)
}

/// `max(|W(e_i, e_j, e_k, e_1)|, |W(e_a, e_b, e_c, e_d)|)` for `n = 4`.
pub fn weyl_restricted_at(pe: &PointEval, tol: f64) -> Result<ResidualReport> {
    let n = pe.dim();
    if n != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            actual: n,
        });
    }
    let frame = adapted_frame_at(pe)?;
    let w = frame.components4(&pe.cp.weyl);
    let mut normal = 0.0f64;
    let mut tangent = 0.0f64;
    for [i, j, k, l] in w.indices() {
        let v = w[[i, j, k, l]].abs();
        if l == 0 {
            normal = normal.max(v);
        }
        if i > 0 && j > 0 && k > 0 && l > 0 {
            tangent = tangent.max(v);
        }
    }
    let value = normal.max(tangent);
    Ok(ResidualReport::new(
        "restricted_weyl",
        value,
        w.frobenius(),
        tol,
        &pe.point,
    ))
}

pub fn weyl_restricted_check(
    inst: &SolitonInstance,
    p: &Point,
    tol: f64,
) -> Result<ResidualReport> {
    weyl_restricted_at(&evaluate_point(inst, p)?, tol)
}

/// Summary of level-surface quantities over several points on one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSpreads {
    pub samples: usize,
    pub grad_norm2_spread: f64,
    pub scalar_spread: f64,
    pub ric_mixed_max: f64,
    pub h_isotropy_max: f64,
    pub mean_curvature_defect_max: f64,
    pub mean_curvature_spread: f64,
    pub ric_tangent_dev_max: f64,
    pub lambda_spread: f64,
    pub mu_spread: f64,
    /// over all tangent planes at all sampled points
    pub sect_spread: f64,
    pub sect_closed_form_defect_max: Option<f64>,
}

impl LevelSpreads {
    pub fn from_reports(reports: &[LevelSetReport]) -> Self {
        let fold_max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
        let closed = reports
            .iter()
            .map(|r| {
                r.sect_closed_form.map(|c| {
                    r.sect
                        .iter()
                        .map(|s| (s.value - c).abs())
                        .fold(0.0, f64::max)
                })
            })
            .collect::<Option<Vec<_>>>()
            .map(|v| v.into_iter().fold(0.0, f64::max));
        Self {
            samples: reports.len(),
            grad_norm2_spread: spread(reports.iter().map(|r| r.grad_norm * r.grad_norm)),
            scalar_spread: spread(reports.iter().map(|r| r.scalar)),
            ric_mixed_max: fold_max(&mut reports.iter().map(|r| r.ric_mixed_max())),
            h_isotropy_max: fold_max(&mut reports.iter().map(|r| r.h_isotropy)),
            mean_curvature_defect_max: fold_max(
                &mut reports
                    .iter()
                    .map(|r| (r.mean_curvature - r.mean_curvature_predicted).abs()),
            ),
            mean_curvature_spread: spread(reports.iter().map(|r| r.mean_curvature)),
            ric_tangent_dev_max: fold_max(&mut reports.iter().map(|r| r.ric_tangent_dev)),
            lambda_spread: spread(reports.iter().map(|r| r.lambda)),
            mu_spread: spread(reports.iter().map(|r| r.mu)),
            sect_spread: spread(reports.iter().flat_map(|r| r.sect.iter().map(|s| s.value))),
            sect_closed_form_defect_max: closed,
        }
    }

    /// The level-surface structure checks as named reports at `point`.
    pub fn reports(&self, tol: f64, point: &Point) -> Vec<ResidualReport> {
        let mut out = vec![
            ResidualReport::scalar(
                "level_grad_norm_constant",
                self.grad_norm2_spread,
                tol,
                point,
            ),
            ResidualReport::scalar("level_scalar_constant", self.scalar_spread, tol, point),
            ResidualReport::scalar("level_ricci_mixed_zero", self.ric_mixed_max, tol, point),
            ResidualReport::scalar("level_umbilic", self.h_isotropy_max, tol, point),
            ResidualReport::scalar(
                "level_mean_curvature_formula",
                self.mean_curvature_defect_max,
                tol,
                point,
            ),
            ResidualReport::scalar(
                "level_mean_curvature_constant",
                self.mean_curvature_spread,
                tol,
                point,
            ),
            ResidualReport::scalar(
                "level_ricci_tangent_isotropic",
                self.ric_tangent_dev_max,
                tol,
                point,
            ),
            ResidualReport::scalar(
                "level_eigenvalues_constant",
                self.lambda_spread.max(self.mu_spread),
                tol,
                point,
            ),
            ResidualReport::scalar("level_sectional_constant", self.sect_spread, tol, point),
        ];
        if let Some(c) = self.sect_closed_form_defect_max {
            out.push(ResidualReport::scalar(
                "level_sectional_closed_form",
                c,
                tol,
                point,
            ));
        }
        out
    }
}

/// Project `start` onto `{f = c}` by Newton steps along the coordinate
/// gradient. `None` if it does not converge inside the sample box.
pub fn project_to_level(inst: &SolitonInstance, start: &[f64], c: f64) -> Option<Point> {
    let mut x = start.to_vec();
    for _ in 0..PROJECTION_ITERATIONS {
        let p = Point::new(x.clone()).ok()?;
        if !inst.sample_box.contains(&x) {
            return None;
        }
        let j = evaluate_scalar_jet_to(&inst.potential, &p, 1).ok()?;
        let gap = j.value - c;
        if gap.abs() <= 1e-13 * (1.0 + c.abs()) {
            return Some(p);
        }
        let g2: f64 = j.grad.iter().map(|v| v * v).sum();
        if !(g2 > 0.0) {
            return None;
        }
        for (xi, gi) in x.iter_mut().zip(&j.grad) {
            *xi -= gap * gi / g2;
        }
    }
    None
}

const PROJECTION_ITERATIONS: usize = 40;

/// `anchor` followed by up to `count − 1` further points of its level surface,
/// obtained by projecting random sample-box points. Gives up after
/// `8 count` attempts.
pub fn level_points<R: Rng>(
    inst: &SolitonInstance,
    anchor: &Point,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    let c = evaluate_scalar_jet_to(&inst.potential, anchor, 0)?.value;
    let mut out = vec![anchor.clone()];
    let mut attempts = 0;
    while out.len() < count && attempts < 8 * count {
        attempts += 1;
        let start = inst.sample_box.sample(rng);
        if let Some(p) = project_to_level(inst, &start, c) {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{CatalogField, FieldSpec};
    use crate::soliton::{MParam, SolitonParams};

    fn flat(f: &str) -> SolitonInstance {
        SolitonInstance::new(
            "t",
            FieldSpec::catalog(CatalogField::Flat { dim: 3 }),
            FieldSpec::scalar_expr(3, f).unwrap(),
            SolitonParams::new(MParam::Finite(1.0), 0.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn linear_potential_gives_standard_basis() {
        let inst = flat("x1");
        let p = Point::new(vec![0.1, 0.2, 0.3]).unwrap();
        let fr = adapted_frame(&inst, &p).unwrap();
        assert_eq!(
            fr.vectors,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ]
        );
    }

    #[test]
    fn round_sphere_level_in_flat_space() {
        let inst = flat("x1*x1+x2*x2+x3*x3");
        let r: f64 = 0.9;
        let p = Point::new(vec![r * 0.6, r * 0.0, r * 0.8]).unwrap();
        let rep = level_set_report(&inst, &p).unwrap();
        assert!((rep.mean_curvature - 2.0 / r).abs() < 1e-12);
        assert!(rep.h_isotropy < 1e-12);
        assert!((rep.sect[0].value - 1.0 / (r * r)).abs() < 1e-10);
    }

    #[test]
    fn weyl_check_needs_four_dimensions() {
        let inst = flat("x1");
        let p = Point::new(vec![0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            weyl_restricted_check(&inst, &p, 1e-6),
            Err(Error::WrongDimension { .. })
        ));
    }
}
