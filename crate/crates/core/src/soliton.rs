//! Pointwise soliton identities on a chart instance `(g, f, m, ρ)`.
//!
//! The soliton equation is `(R − ρ) g_ij = f_ij − (1/m) f_i f_j`; with
//! `m = ∞` every `1/m` term is dropped.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curvature::{covariant_hessian, curvature_pack, CurvaturePack};
use crate::error::{Error, Result};
use crate::jets::{
    evaluate_metric_jet, evaluate_scalar_jet_to, DomainBox, FieldSpec, Point, ScalarJet3,
};
use crate::levelset::adapted_frame_at;
use crate::tensor::{Matrix, Tensor};

/// The constant `m`: a nonzero real, or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MParam {
    Finite(f64),
    Infinity,
}

impl MParam {
    /// `1/m`, zero at infinity.
    pub fn inv(self) -> f64 {
        match self {
            MParam::Finite(m) => 1.0 / m,
            MParam::Infinity => 0.0,
        }
    }

    pub fn is_valid(self) -> bool {
        match self {
            MParam::Finite(m) => m != 0.0 && m.is_finite(),
            MParam::Infinity => true,
        }
    }
}

impl fmt::Display for MParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MParam::Finite(m) => write!(f, "{m}"),
            MParam::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for MParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(MParam::Infinity),
            _ => {
                let v: f64 = t.parse().map_err(|_| {
                    Error::InvalidParameter(format!("m = {s:?} is not a number or 'inf'"))
                })?;
                if v.is_infinite() && v > 0.0 {
                    return Ok(MParam::Infinity);
                }
                let m = MParam::Finite(v);
                if m.is_valid() {
                    Ok(m)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "m must be nonzero and finite, got {s}"
                    )))
                }
            }
        }
    }
}

impl Serialize for MParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MParam::Finite(m) => s.serialize_f64(*m),
            MParam::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Accepts a number or one of the strings understood by `FromStr`.
impl<'de> Deserialize<'de> for MParam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let m = match Raw::deserialize(d)? {
            Raw::Num(v) => v.to_string().parse(),
            Raw::Text(t) => t.parse(),
        };
        m.map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolitonParams {
    pub m: MParam,
    pub rho: f64,
}

impl SolitonParams {
    pub fn new(m: MParam, rho: f64) -> Result<Self> {
        if !m.is_valid() {
            return Err(Error::InvalidParameter(format!(
                "m must be nonzero, got {m}"
            )));
        }
        if !rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rho must be finite, got {rho}"
            )));
        }
        Ok(Self { m, rho })
    }

    pub fn inv_m(&self) -> f64 {
        self.m.inv()
    }
}

/// A chart, a metric field, a potential and the constants `(m, ρ)`.
#[derive(Clone, Debug)]
pub struct SolitonInstance {
    pub name: String,
    pub metric: FieldSpec,
    pub potential: FieldSpec,
    pub params: SolitonParams,
    pub domain: DomainBox,
    /// Sub-box used when drawing sample points (keeps clear of chart
    /// singularities and domain edges).
    pub sample_box: DomainBox,
}

impl SolitonInstance {
    pub fn new(
        name: impl Into<String>,
        metric: FieldSpec,
        potential: FieldSpec,
        params: SolitonParams,
    ) -> Result<Self> {
        let n = metric.dim();
        if potential.dim() != n {
            return Err(Error::WrongDimension {
                expected: n,
                actual: potential.dim(),
            });
        }
        if potential.components() != 1 {
            return Err(Error::Shape(format!(
                "potential must be a scalar field, got {} components",
                potential.components()
            )));
        }
        let domain = metric.domain.intersect(&potential.domain);
        Ok(Self {
            name: name.into(),
            metric,
            potential,
            params,
            sample_box: domain.clone(),
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn with_params(mut self, params: SolitonParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_sample_box(mut self, b: DomainBox) -> Self {
        self.sample_box = b.intersect(&self.domain);
        self
    }

    pub fn with_potential(self, potential: FieldSpec) -> Result<Self> {
        let sample_box = self.sample_box;
        Ok(Self::new(self.name, self.metric, potential, self.params)?.with_sample_box(sample_box))
    }
}

/// Everything the pointwise checks need at one point.
#[derive(Clone, Debug)]
pub struct PointEval {
    pub point: Point,
    pub cp: CurvaturePack,
    pub f: ScalarJet3,
    /// covariant Hessian `f_ij`
    pub hess: Matrix,
    /// `f^i`
    pub grad_up: Vec<f64>,
    /// `|∇f|²`
    pub grad_norm2: f64,
    pub params: SolitonParams,
}

impl PointEval {
    pub fn dim(&self) -> usize {
        self.cp.dim()
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad_norm2.max(0.0).sqrt()
    }

    /// `R − ρ`
    pub fn r_rho(&self) -> f64 {
        self.cp.scalar - self.params.rho
    }

    pub fn laplacian(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.cp.inverse[[i, j]] * self.hess[[i, j]];
            }
        }
        s
    }

    /// Error unless `|∇f| > 1e-8 (1 + |f|)`.
    pub fn require_regular(&self) -> Result<()> {
        let floor = GRADIENT_FLOOR * (1.0 + self.f.value.abs());
        let g = self.grad_norm();
        if g > floor {
            Ok(())
        } else {
            Err(Error::CriticalPoint {
                grad_norm: g,
                floor,
            })
        }
    }
}

pub const GRADIENT_FLOOR: f64 = 1e-8;

/// Evaluate metric (order 3), curvature and potential (order `f_order`) at `p`.
pub fn evaluate_point_to(inst: &SolitonInstance, p: &Point, f_order: usize) -> Result<PointEval> {
    if p.dim() != inst.dim() {
        return Err(Error::WrongDimension {
            expected: inst.dim(),
            actual: p.dim(),
        });
    }
    if !inst.domain.contains(p.coords()) {
        return Err(Error::OutOfDomain {
            point: p.coords().to_vec(),
        });
    }
    let mj = evaluate_metric_jet(&inst.metric, p)?;
    let cp = curvature_pack(&mj)?;
    let f = evaluate_scalar_jet_to(&inst.potential, p, f_order)?;
    let hess = covariant_hessian(&f, &cp);
    let grad_up = cp.raise(&f.grad);
    let grad_norm2 = f.grad.iter().zip(&grad_up).map(|(a, b)| a * b).sum();
    Ok(PointEval {
        point: p.clone(),
        cp,
        f,
        hess,
        grad_up,
        grad_norm2,
        params: inst.params,
    })
}

pub fn evaluate_point(inst: &SolitonInstance, p: &Point) -> Result<PointEval> {
    evaluate_point_to(inst, p, 2)
}

/// Outcome of one identity check at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    /// max-abs over components
    pub value: f64,
    pub frobenius: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub point: Vec<f64>,
}

impl ResidualReport {
    pub fn new(
        name: impl Into<String>,
        value: f64,
        frobenius: f64,
        tolerance: f64,
        point: &Point,
    ) -> Self {
        Self {
            name: name.into(),
            value,
            frobenius,
            tolerance,
            // NaN never passes
            pass: value <= tolerance,
            point: point.coords().to_vec(),
        }
    }

    pub fn scalar(name: impl Into<String>, value: f64, tolerance: f64, point: &Point) -> Self {
        Self::new(name, value, value, tolerance, point)
    }
}

/// `E_ij = f_ij − (1/m) f_i f_j − (R − ρ) g_ij`
pub fn soliton_residual_at(pe: &PointEval) -> Matrix {
    let inv_m = pe.params.inv_m();
    let rr = pe.r_rho();
    let n = pe.dim();
    Matrix::from_fn(n, |[i, j]| {
        pe.hess[[i, j]] - inv_m * pe.f.grad[i] * pe.f.grad[j] - rr * pe.cp.metric[[i, j]]
    })
}

pub fn soliton_residual(inst: &SolitonInstance, p: &Point) -> Result<Matrix> {
    Ok(soliton_residual_at(&evaluate_point(inst, p)?))
}

pub fn soliton_report(pe: &PointEval, tol: f64) -> ResidualReport {
    let e = soliton_residual_at(pe);
    ResidualReport::new(
        "soliton_equation",
        e.max_abs(),
        e.frobenius(),
        tol,
        &pe.point,
    )
}

/// The three contracted consequences of the soliton equation:
///
/// 1. `|n R_ρ − (Δf − |∇f|²/m)|`
/// 2. `max_i |2 f_ij f^j − 2 R_ρ f_i − (2/m) |∇f|² f_i|`
/// 3. `max_i |∂_i R − (R_ρ/m) f_i + R_ij f^j/(n−1)|`
pub fn contracted_identity_values(pe: &PointEval) -> [(f64, f64); 3] {
    let n = pe.dim();
    let nf = n as f64;
    let inv_m = pe.params.inv_m();
    let rr = pe.r_rho();
    let g2 = pe.grad_norm2;
    let r1 = (nf * rr - (pe.laplacian() - inv_m * g2)).abs();
    let mut r2 = vec![0.0; n];
    let mut r3 = vec![0.0; n];
    for i in 0..n {
        let hf: f64 = (0..n).map(|j| pe.hess[[i, j]] * pe.grad_up[j]).sum();
        let fi = pe.f.grad[i];
        r2[i] = 2.0 * hf - 2.0 * rr * fi - 2.0 * inv_m * g2 * fi;
        let rf: f64 = (0..n).map(|j| pe.cp.ricci[[i, j]] * pe.grad_up[j]).sum();
        r3[i] = pe.cp.grad_scalar[i] - rr * inv_m * fi + rf / (nf - 1.0);
    }
    let norms = |v: &[f64]| {
        (
            v.iter().fold(0.0f64, |a, x| a.max(x.abs())),
            v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        )
    };
    [(r1, r1), norms(&r2), norms(&r3)]
}

pub fn contracted_identity_reports(pe: &PointEval, tol: f64) -> [ResidualReport; 3] {
    let [a, b, c] = contracted_identity_values(pe);
    [
        ResidualReport::new("trace_identity", a.0, a.1, tol, &pe.point),
        ResidualReport::new("grad_norm_identity", b.0, b.1, tol, &pe.point),
        ResidualReport::new("scalar_gradient_identity", c.0, c.1, tol, &pe.point),
    ]
}

pub fn contracted_identity_residuals(
    inst: &SolitonInstance,
    p: &Point,
    tol: f64,
) -> Result<[ResidualReport; 3]> {
    Ok(contracted_identity_reports(&evaluate_point(inst, p)?, tol))
}

/// `D_ijk`, antisymmetric in `(i, j)` by construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DTensor {
    pub d: Tensor<3>,
}

impl DTensor {
    /// `max |D_ijk + D_jik|`
    pub fn antisymmetry(&self) -> f64 {
        let d = &self.d;
        d.indices()
            .map(|[i, j, k]| (d[[i, j, k]] + d[[j, i, k]]).abs())
            .fold(0.0, f64::max)
    }

    /// `(max_k |g^{ij} D_ijk|, max_j |g^{ik} D_ijk|)`
    pub fn traces(&self, ginv: &Matrix) -> (f64, f64) {
        let n = ginv.dim();
        let d = &self.d;
        let mut t1 = 0.0f64;
        let mut t2 = 0.0f64;
        for x in 0..n {
            let mut a = 0.0;
            let mut b = 0.0;
            for p in 0..n {
                for q in 0..n {
                    a += ginv[[p, q]] * d[[p, q, x]];
                    b += ginv[[p, q]] * d[[p, x, q]];
                }
            }
            t1 = t1.max(a.abs());
            t2 = t2.max(b.abs());
        }
        (t1, t2)
    }

    /// `|D|² = g^{ia} g^{jb} g^{kc} D_ijk D_abc`
    pub fn norm2(&self, ginv: &Matrix) -> f64 {
        let up = raise_all3(&self.d, ginv);
        self.d
            .as_slice()
            .iter()
            .zip(up.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }
}

fn raise_all3(t: &Tensor<3>, ginv: &Matrix) -> Tensor<3> {
    let n = ginv.dim();
    let a = Tensor::<3>::from_fn(n, |[i, j, k]| {
        (0..n).map(|p| ginv[[i, p]] * t[[p, j, k]]).sum()
    });
    let b = Tensor::<3>::from_fn(n, |[i, j, k]| {
        (0..n).map(|p| ginv[[j, p]] * a[[i, p, k]]).sum()
    });
    Tensor::<3>::from_fn(n, |[i, j, k]| {
        (0..n).map(|p| ginv[[k, p]] * b[[i, j, p]]).sum()
    })
}

/// ```text
/// D_ijk = (R_kj f_i − R_ki f_j)/(n−2)
///       + (R_il f^l g_jk − R_jl f^l g_ik)/((n−1)(n−2))
///       − R (g_kj f_i − g_ki f_j)/((n−1)(n−2))
/// ```
pub fn d_tensor_at(pe: &PointEval) -> DTensor {
    let n = pe.dim();
    let nf = n as f64;
    let a = 1.0 / (nf - 2.0);
    let b = 1.0 / ((nf - 1.0) * (nf - 2.0));
    let ric = &pe.cp.ricci;
    let g = &pe.cp.metric;
    let f = &pe.f.grad;
    let rf = ric.mat_vec(&pe.grad_up);
    let r = pe.cp.scalar;
    let half = Tensor::<3>::from_fn(n, |[i, j, k]| {
        a * ric[[k, j]] * f[i] + b * rf[i] * g[[j, k]] - b * r * g[[k, j]] * f[i]
    });
    DTensor {
        d: Tensor::<3>::from_fn(n, |[i, j, k]| half[[i, j, k]] - half[[j, i, k]]),
    }
}

pub fn d_tensor(inst: &SolitonInstance, p: &Point) -> Result<DTensor> {
    Ok(d_tensor_at(&evaluate_point(inst, p)?))
}

/// `W_ijkl f^l`
pub fn weyl_gradient(pe: &PointEval) -> Tensor<3> {
    let n = pe.dim();
    Tensor::<3>::from_fn(n, |[i, j, k]| {
        (0..n)
            .map(|l| pe.cp.weyl[[i, j, k, l]] * pe.grad_up[l])
            .sum()
    })
}

/// `max |D_ijk − W_ijkl f^l|`
pub fn d_weyl_report(pe: &PointEval, tol: f64) -> ResidualReport {
    let d = d_tensor_at(pe);
    let diff = d.d.zip_with(&weyl_gradient(pe), |a, b| a - b);
    ResidualReport::new(
        "d_equals_weyl_gradient",
        diff.max_abs(),
        diff.frobenius(),
        tol,
        &pe.point,
    )
}

pub fn d_weyl_residual(inst: &SolitonInstance, p: &Point, tol: f64) -> Result<ResidualReport> {
    Ok(d_weyl_report(&evaluate_point(inst, p)?, tol))
}

/// Both sides of the frame formula for `|D|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DNormSides {
    pub direct: f64,
    pub frame: f64,
}

impl DNormSides {
    pub fn relative_difference(&self) -> f64 {
        let scale = self.direct.abs().max(self.frame.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.direct - self.frame).abs() / scale
        }
    }
}

/// `|D|²` by full contraction, and by
/// `2|∇f|²/((n−1)(n−2)²) {(n−2) Σ_a R_1a² + (n−1) Σ_ab (R_ab − (R−R_11)/(n−1) δ_ab)²}`
/// in the adapted frame.
pub fn d_norm_sides(pe: &PointEval) -> Result<DNormSides> {
    let frame = adapted_frame_at(pe)?;
    let n = pe.dim();
    let nf = n as f64;
    let direct = d_tensor_at(pe).norm2(&pe.cp.inverse);
    let ric = frame.components2(&pe.cp.ricci);
    let r11 = ric[[0, 0]];
    let mu = (pe.cp.scalar - r11) / (nf - 1.0);
    let mixed: f64 = (1..n).map(|a| ric[[0, a]] * ric[[0, a]]).sum();
    let mut dev = 0.0;
    for a in 1..n {
        for b in 1..n {
            let v = ric[[a, b]] - if a == b { mu } else { 0.0 };
            dev += v * v;
        }
    }
    let frame_side = 2.0 * pe.grad_norm2 / ((nf - 1.0) * (nf - 2.0).powi(2))
        * ((nf - 2.0) * mixed + (nf - 1.0) * dev);
    Ok(DNormSides {
        direct,
        frame: frame_side,
    })
}

pub fn d_norm_report(pe: &PointEval, tol: f64) -> Result<ResidualReport> {
    let s = d_norm_sides(pe)?;
    Ok(ResidualReport::scalar(
        "d_norm_frame_formula",
        s.relative_difference(),
        tol,
        &pe.point,
    ))
}

pub fn d_norm_check(inst: &SolitonInstance, p: &Point, tol: f64) -> Result<ResidualReport> {
    d_norm_report(&evaluate_point(inst, p)?, tol)
}

/// `L(u) = Δu − (1/m) <∇f, ∇u>`
pub fn weighted_l_at(pe: &PointEval, u: &ScalarJet3) -> f64 {
    let n = pe.dim();
    let uh = covariant_hessian(u, &pe.cp);
    let mut lap = 0.0;
    for i in 0..n {
        for j in 0..n {
            lap += pe.cp.inverse[[i, j]] * uh[[i, j]];
        }
    }
    let cross: f64 = pe.grad_up.iter().zip(&u.grad).map(|(a, b)| a * b).sum();
    lap - pe.params.inv_m() * cross
}

pub fn weighted_l(inst: &SolitonInstance, u: &FieldSpec, p: &Point) -> Result<f64> {
    let pe = evaluate_point(inst, p)?;
    let uj = evaluate_scalar_jet_to(u, p, 2)?;
    Ok(weighted_l_at(&pe, &uj))
}
