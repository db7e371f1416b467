//! Value-and-derivative jets of metric and scalar fields at a point.
//!
//! Analytic fields (catalog, expression, profile) are differentiated exactly with
//! nested dual numbers: one evaluation per sorted index triple `i ≤ j ≤ k`.
//! Black-box fields fall back to Richardson-extrapolated central differences
//! (see [`fd`]).

pub mod dual;
pub mod expr;
pub mod fd;
pub mod field;

use nalgebra::DMatrix;

use self::dual::{seed1, seed2, seed3, unpack3, D1, D2, D3};
pub use self::expr::Expr;
use self::fd::permutations3;
pub use self::field::{
    sym_index, sym_len, BlackBox, CatalogField, DomainBox, ExprField, FieldKind, FieldSpec,
    ProfileField, ProfileRole,
};
use crate::error::{Error, Result};
use crate::tensor::{Matrix, Tensor};

/// A chart point. Dimension is at least 3.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::WrongDimension {
                expected: 3,
                actual: coords.len(),
            });
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

/// Value and coordinate partials of one component, orders 0..=3.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentJet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Matrix,
    pub third: Tensor<3>,
}

/// Scalar field jet; every array holds plain coordinate partials.
pub type ScalarJet3 = ComponentJet;

impl ScalarJet3 {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Largest departure from full symmetry of the third partials.
    pub fn third_asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for [i, j, k] in self.third.indices() {
            for [a, b, c] in permutations3(i, j, k) {
                m = m.max((self.third[[i, j, k]] - self.third[[a, b, c]]).abs());
            }
        }
        m
    }

    /// Linear combination `a·self + b·other`, the jet of `a u + b v`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            value: a * self.value + b * other.value,
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            hess: self.hess.zip_with(&other.hess, |x, y| a * x + b * y),
            third: self.third.zip_with(&other.third, |x, y| a * x + b * y),
        }
    }
}

/// Metric components and their partials.
///
/// `dg[[i, j, k]] = ∂_k g_ij`, `d2g[[i, j, k, l]] = ∂_k ∂_l g_ij`, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet3 {
    pub g: Matrix,
    pub dg: Tensor<3>,
    pub d2g: Tensor<4>,
    pub d3g: Tensor<5>,
}

impl MetricJet3 {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn flat(n: usize) -> Self {
        Self {
            g: Matrix::identity(n),
            dg: Tensor::zeros(n),
            d2g: Tensor::zeros(n),
            d3g: Tensor::zeros(n),
        }
    }

    pub fn max_derivative_asymmetry(&self) -> f64 {
        let mut m = self.g.asymmetry();
        for [i, j, k] in self.dg.indices() {
            m = m.max((self.dg[[i, j, k]] - self.dg[[j, i, k]]).abs());
        }
        for [i, j, k, l] in self.d2g.indices() {
            let v = self.d2g[[i, j, k, l]];
            m = m.max((v - self.d2g[[j, i, k, l]]).abs());
            m = m.max((v - self.d2g[[i, j, l, k]]).abs());
        }
        for [i, j, k, l, q] in self.d3g.indices() {
            let v = self.d3g[[i, j, k, l, q]];
            m = m.max((v - self.d3g[[j, i, k, l, q]]).abs());
            for [a, b, c] in permutations3(k, l, q) {
                m = m.max((v - self.d3g[[i, j, a, b, c]]).abs());
            }
        }
        m
    }
}

/// Inverse metric and its first partials, `dginv[[i, j, k]] = ∂_k g^{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseMetricJet {
    pub ginv: Matrix,
    pub dginv: Tensor<3>,
}

/// Per-component jets up to `order` (0..=3). Higher-order slots are zero.
pub fn component_jets(field: &FieldSpec, p: &[f64], order: usize) -> Result<Vec<ComponentJet>> {
    field.check_domain(p)?;
    if let FieldKind::BlackBox(b) = &field.kind {
        let f = b.func.clone();
        let jets = fd::fd_component_jets(&move |x: &[f64]| f(x), p, order);
        if jets.len() != b.components {
            return Err(Error::Shape(format!(
                "black box returned {} components, declared {}",
                jets.len(),
                b.components
            )));
        }
        return Ok(jets);
    }
    let n = p.len();
    let nc = field.components();
    let mut jets: Vec<ComponentJet> = (0..nc)
        .map(|_| ComponentJet {
            value: 0.0,
            grad: vec![0.0; n],
            hess: Matrix::zeros(n),
            third: Tensor::zeros(n),
        })
        .collect();
    match order {
        0 => {
            for (jet, v) in jets.iter_mut().zip(field.eval_generic::<f64>(p)?) {
                jet.value = v;
            }
        }
        1 => {
            for i in 0..n {
                let x: Vec<D1> = (0..n).map(|l| seed1(p[l], l, i)).collect();
                for (jet, y) in jets.iter_mut().zip(field.eval_generic(&x)?) {
                    jet.value = y.re;
                    jet.grad[i] = y.eps;
                }
            }
        }
        2 => {
            for i in 0..n {
                for j in i..n {
                    let x: Vec<D2> = (0..n).map(|l| seed2(p[l], l, i, j)).collect();
                    for (jet, y) in jets.iter_mut().zip(field.eval_generic(&x)?) {
                        jet.value = y.re.re;
                        jet.grad[i] = y.eps.re;
                        jet.grad[j] = y.re.eps;
                        jet.hess[[i, j]] = y.eps.eps;
                        jet.hess[[j, i]] = y.eps.eps;
                    }
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let x: Vec<D3> = (0..n).map(|l| seed3(p[l], l, i, j, k)).collect();
                        for (jet, y) in jets.iter_mut().zip(field.eval_generic(&x)?) {
                            let u = unpack3(y);
                            jet.value = u.value;
                            jet.grad[i] = u.di;
                            jet.grad[j] = u.dj;
                            jet.grad[k] = u.dk;
                            for (a, b, v) in [(i, j, u.dij), (i, k, u.dik), (j, k, u.djk)] {
                                jet.hess[[a, b]] = v;
                                jet.hess[[b, a]] = v;
                            }
                            for idx in permutations3(i, j, k) {
                                jet.third[idx] = u.dijk;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(jets)
}

/// Scalar-field jet to order 3.
pub fn evaluate_scalar_jet(field: &FieldSpec, p: &Point) -> Result<ScalarJet3> {
    evaluate_scalar_jet_to(field, p, 3)
}

/// Scalar-field jet with partials only up to `order`; the rest are zero.
pub fn evaluate_scalar_jet_to(field: &FieldSpec, p: &Point, order: usize) -> Result<ScalarJet3> {
    if field.components() != 1 {
        return Err(Error::Shape(format!(
            "scalar field expected, got {} components",
            field.components()
        )));
    }
    Ok(component_jets(field, p.coords(), order)?.remove(0))
}

/// Metric jet to order 3, with a positive-definiteness check.
pub fn evaluate_metric_jet(field: &FieldSpec, p: &Point) -> Result<MetricJet3> {
    evaluate_metric_jet_to(field, p, 3)
}

pub fn evaluate_metric_jet_to(field: &FieldSpec, p: &Point, order: usize) -> Result<MetricJet3> {
    let n = p.dim();
    if field.components() != sym_len(n) {
        return Err(Error::Shape(format!(
            "metric field in dimension {n} needs {} components, got {}",
            sym_len(n),
            field.components()
        )));
    }
    let comps = component_jets(field, p.coords(), order)?;
    let mut mj = MetricJet3 {
        g: Matrix::zeros(n),
        dg: Tensor::zeros(n),
        d2g: Tensor::zeros(n),
        d3g: Tensor::zeros(n),
    };
    for i in 0..n {
        for j in 0..n {
            let c = &comps[sym_index(n, i, j)];
            mj.g[[i, j]] = c.value;
            for k in 0..n {
                mj.dg[[i, j, k]] = c.grad[k];
                for l in 0..n {
                    mj.d2g[[i, j, k, l]] = c.hess[[k, l]];
                    for q in 0..n {
                        mj.d3g[[i, j, k, l, q]] = c.third[[k, l, q]];
                    }
                }
            }
        }
    }
    if !is_positive_definite(&mj.g) {
        return Err(Error::NotPositiveDefinite {
            point: p.coords().to_vec(),
        });
    }
    Ok(mj)
}

pub(crate) fn is_positive_definite(g: &Matrix) -> bool {
    let m = g.to_nalgebra();
    m.iter().all(|v| v.is_finite()) && m.cholesky().is_some()
}

/// `g^{-1}` and `∂_k g^{-1} = -g^{-1} (∂_k g) g^{-1}`.
pub fn inverse_metric_jet(mj: &MetricJet3) -> Result<InverseMetricJet> {
    let n = mj.dim();
    let chol =
        mj.g.to_nalgebra()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite { point: vec![] })?;
    let inv = chol.inverse();
    // symmetrize away rounding noise
    let inv: DMatrix<f64> = (&inv + inv.transpose()) * 0.5;
    let ginv = Matrix::from_nalgebra(&inv);
    let mut dginv = Tensor::zeros(n);
    for k in 0..n {
        let dk = Matrix::from_fn(n, |[i, j]| mj.dg[[i, j, k]]);
        let prod = ginv.matmul(&dk).matmul(&ginv);
        for i in 0..n {
            for j in 0..n {
                dginv[[i, j, k]] = -prod[[i, j]];
            }
        }
    }
    Ok(InverseMetricJet { ginv, dginv })
}
