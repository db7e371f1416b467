//! Field definitions: what a metric or scalar field *is*, independent of how
//! its derivatives are taken.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dual::Scalar;
use super::expr::Expr;
use crate::construct::profile::ProfileInterpolant;
use crate::error::{Error, Result};

/// Axis-aligned box in chart coordinates, closed on both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.lo.len()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| a.max(*b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| a.min(*b))
                .collect(),
        }
    }

    /// Shrink every side inward by `margin` times its width.
    pub fn shrink(&self, margin: f64) -> Self {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| {
                let w = b - a;
                (a + margin * w, b - margin * w)
            })
            .unzip();
        Self { lo, hi }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| if b > a { rng.gen_range(a..=b) } else { a })
            .collect()
    }
}

/// Symmetric-matrix component list: upper triangle, row-major.
pub fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

pub fn sym_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Sum of `c_α x^α` over monomials of degree ≤ 3.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicPoly {
    terms: Vec<(Vec<u8>, f64)>,
}

impl CubicPoly {
    pub(crate) fn random<R: Rng>(dim: usize, rng: &mut R, scale: f64) -> Self {
        let terms = monomials_up_to_3(dim)
            .into_iter()
            .map(|e| (e, scale * rng.gen_range(-1.0..=1.0)))
            .collect();
        Self { terms }
    }

    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let mut acc = S::cst(0.0);
        for (exps, c) in &self.terms {
            let mut m = S::cst(*c);
            for (l, &e) in exps.iter().enumerate() {
                if e > 0 {
                    m = m * x[l].powi(e as i32);
                }
            }
            acc = acc + m;
        }
        acc
    }
}

fn monomials_up_to_3(dim: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; dim]];
    for a in 0..dim {
        let mut e = vec![0u8; dim];
        e[a] += 1;
        out.push(e.clone());
        for b in a..dim {
            let mut e2 = e.clone();
            e2[b] += 1;
            out.push(e2.clone());
            for c in b..dim {
                let mut e3 = e2.clone();
                e3[c] += 1;
                out.push(e3);
            }
        }
    }
    out
}

/// Built-in field families.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogField {
    /// Euclidean metric.
    Flat { dim: usize },
    /// Euclidean metric in hyperspherical coordinates `(r, θ1, …, θ_{n-1})`.
    PolarFlat { dim: usize },
    /// Round sphere of the given radius in stereographic coordinates.
    Sphere { dim: usize, radius: f64 },
    /// Round sphere of the given radius in hyperspherical coordinates `(χ, θ1, …)`.
    SpherePolar { dim: usize, radius: f64 },
    /// Upper half-space model `x_n^{-2} δ`, sectional curvature −1.
    Hyperbolic { dim: usize },
    /// Unit round `S^k` (stereographic, first `k` coordinates) times flat `R^l`.
    SphereProduct { sphere_dim: usize, flat_dim: usize },
    /// `δ + ε A(x)` with `A` symmetric, entries random cubic polynomials.
    RandomPoly {
        dim: usize,
        seed: u64,
        eps: f64,
        entries: Vec<CubicPoly>,
    },
    /// `e^{2u} g_base`.
    Conformal { base: Box<CatalogField>, u: Expr },
    /// Scalar: random cubic polynomial.
    RandomCubic {
        dim: usize,
        seed: u64,
        poly: CubicPoly,
    },
}

impl CatalogField {
    pub fn random_poly(dim: usize, seed: u64, eps: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..sym_len(dim))
            .map(|_| CubicPoly::random(dim, &mut rng, 1.0))
            .collect();
        CatalogField::RandomPoly {
            dim,
            seed,
            eps,
            entries,
        }
    }

    pub fn random_cubic(dim: usize, seed: u64) -> Self {
        // distinct stream from the metric generator with the same seed
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d_cafe_d00d);
        CatalogField::RandomCubic {
            dim,
            seed,
            poly: CubicPoly::random(dim, &mut rng, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CatalogField::Flat { dim }
            | CatalogField::PolarFlat { dim }
            | CatalogField::Sphere { dim, .. }
            | CatalogField::SpherePolar { dim, .. }
            | CatalogField::Hyperbolic { dim }
            | CatalogField::RandomPoly { dim, .. }
            | CatalogField::RandomCubic { dim, .. } => *dim,
            CatalogField::SphereProduct {
                sphere_dim,
                flat_dim,
            } => sphere_dim + flat_dim,
            CatalogField::Conformal { base, .. } => base.dim(),
        }
    }

    pub fn components(&self) -> usize {
        match self {
            CatalogField::RandomCubic { .. } => 1,
            _ => sym_len(self.dim()),
        }
    }

    pub fn default_domain(&self) -> DomainBox {
        let n = self.dim();
        match self {
            CatalogField::PolarFlat { .. } | CatalogField::SpherePolar { .. } => {
                let mut b = angular_box(n);
                if let CatalogField::PolarFlat { .. } = self {
                    b.lo[0] = 0.0;
                    b.hi[0] = 10.0;
                } else {
                    b.lo[0] = 0.0;
                    b.hi[0] = std::f64::consts::PI;
                }
                b
            }
            CatalogField::Hyperbolic { .. } => {
                let mut b = DomainBox::cube(n, -1.0, 1.0);
                b.lo[n - 1] = 0.25;
                b.hi[n - 1] = 2.0;
                b
            }
            CatalogField::Conformal { base, .. } => base.default_domain(),
            _ => DomainBox::cube(n, -1.0, 1.0),
        }
    }

    pub fn name(&self) -> String {
        match self {
            CatalogField::Flat { dim } => format!("FLAT{dim}"),
            CatalogField::PolarFlat { dim } => format!("POLARFLAT{dim}"),
            CatalogField::Sphere { dim, radius } => format!("SPHERE{dim}(r={radius})"),
            CatalogField::SpherePolar { dim, radius } => format!("SPHEREPOLAR{dim}(r={radius})"),
            CatalogField::Hyperbolic { dim } => format!("HYP{dim}"),
            CatalogField::SphereProduct {
                sphere_dim,
                flat_dim,
            } => format!("S{sphere_dim}xR{flat_dim}"),
            CatalogField::RandomPoly { dim, seed, eps, .. } => {
                format!("RANDOMPOLY{dim}(seed={seed},eps={eps})")
            }
            CatalogField::Conformal { base, u } => format!("exp(2*({u}))*{}", base.name()),
            CatalogField::RandomCubic { dim, seed, .. } => format!("RANDOMCUBIC{dim}(seed={seed})"),
        }
    }

    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let n = self.dim();
        match self {
            CatalogField::Flat { .. } => conformally_flat(n, S::cst(1.0)),
            CatalogField::PolarFlat { .. } => spherical_diag(n, x, S::cst(1.0), x[0]),
            CatalogField::Sphere { radius, .. } => {
                let r2 = x.iter().fold(S::cst(0.0), |a, &v| a + v * v);
                let c = S::cst(4.0 * radius * radius) / (r2.add_cst(1.0)).powi(2);
                conformally_flat(n, c)
            }
            CatalogField::SpherePolar { radius, .. } => {
                spherical_diag(n, x, S::cst(radius * radius), x[0].sin().scale(*radius))
            }
            CatalogField::Hyperbolic { .. } => conformally_flat(n, x[n - 1].powi(-2)),
            CatalogField::SphereProduct { sphere_dim, .. } => {
                let k = *sphere_dim;
                let r2 = x[..k].iter().fold(S::cst(0.0), |a, &v| a + v * v);
                let c = S::cst(4.0) / (r2.add_cst(1.0)).powi(2);
                let mut out = vec![S::cst(0.0); sym_len(n)];
                for i in 0..n {
                    out[sym_index(n, i, i)] = if i < k { c } else { S::cst(1.0) };
                }
                out
            }
            CatalogField::RandomPoly { eps, entries, .. } => {
                let mut out: Vec<S> = entries.iter().map(|p| p.eval(x).scale(*eps)).collect();
                for i in 0..n {
                    let s = sym_index(n, i, i);
                    out[s] = out[s].add_cst(1.0);
                }
                out
            }
            CatalogField::Conformal { base, u } => {
                let w = (u.eval(x).scale(2.0)).exp();
                base.eval(x).into_iter().map(|g| g * w).collect()
            }
            CatalogField::RandomCubic { poly, .. } => vec![poly.eval(x)],
        }
    }
}

fn angular_box(n: usize) -> DomainBox {
    use std::f64::consts::PI;
    let mut b = DomainBox::cube(n, 0.0, PI);
    b.lo[n - 1] = -PI;
    b.hi[n - 1] = PI;
    b
}

pub(crate) fn conformally_flat<S: Scalar>(n: usize, c: S) -> Vec<S> {
    let mut out = vec![S::cst(0.0); sym_len(n)];
    for i in 0..n {
        out[sym_index(n, i, i)] = c;
    }
    out
}

/// `a² dr² + w² (dθ1² + sin²θ1 dθ2² + …)` as an upper-triangle component list.
pub(crate) fn spherical_diag<S: Scalar>(n: usize, x: &[S], radial: S, w: S) -> Vec<S> {
    let mut out = vec![S::cst(0.0); sym_len(n)];
    out[sym_index(n, 0, 0)] = radial;
    let mut ang = w * w;
    for k in 1..n {
        out[sym_index(n, k, k)] = ang;
        if k + 1 < n {
            let s = x[k].sin();
            ang = ang * s * s;
        }
    }
    out
}

/// User-supplied closed-form components.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprField {
    pub dim: usize,
    /// One expression for a scalar field, `n(n+1)/2` (upper triangle) for a metric.
    pub components: Vec<Expr>,
}

pub type BlackBoxFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// An opaque evaluator; derivatives come from finite differences.
#[derive(Clone)]
pub struct BlackBox {
    pub dim: usize,
    pub components: usize,
    pub label: String,
    pub func: Arc<BlackBoxFn>,
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("dim", &self.dim)
            .field("components", &self.components)
            .field("label", &self.label)
            .finish()
    }
}

/// Which radial quantity a profile-backed field exposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileRole {
    /// Warped metric `dr² + φ(r)² g_{S^{n-1}}` in hyperspherical coordinates.
    Metric,
    /// Radial potential `f(r)`.
    Potential,
}

#[derive(Clone, Debug)]
pub struct ProfileField {
    pub dim: usize,
    pub role: ProfileRole,
    pub interp: Arc<ProfileInterpolant>,
}

#[derive(Clone, Debug)]
pub enum FieldKind {
    Catalog(CatalogField),
    Expression(ExprField),
    Profile(ProfileField),
    BlackBox(BlackBox),
}

/// A field together with the box on which it may be evaluated.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub domain: DomainBox,
}

impl FieldSpec {
    pub fn catalog(c: CatalogField) -> Self {
        let domain = c.default_domain();
        Self {
            kind: FieldKind::Catalog(c),
            domain,
        }
    }

    /// Scalar field from one expression, on the default box `[-1, 1]^n`.
    pub fn scalar_expr(dim: usize, src: &str) -> Result<Self> {
        let e = Expr::parse(src)?;
        Self::from_exprs(dim, vec![e])
    }

    pub fn from_exprs(dim: usize, components: Vec<Expr>) -> Result<Self> {
        if components.len() != 1 && components.len() != sym_len(dim) {
            return Err(Error::Shape(format!(
                "{} expressions given; expected 1 (scalar) or {} (metric) for dimension {dim}",
                components.len(),
                sym_len(dim)
            )));
        }
        if let Some(e) = components.iter().find(|e| e.arity() > dim) {
            return Err(Error::Expression(format!(
                "'{e}' uses a coordinate beyond x{dim}"
            )));
        }
        Ok(Self {
            kind: FieldKind::Expression(ExprField { dim, components }),
            domain: DomainBox::cube(dim, -1.0, 1.0),
        })
    }

    /// Diagonal metric from `n` expressions.
    pub fn diagonal_metric(dim: usize, diag: &[&str]) -> Result<Self> {
        if diag.len() != dim {
            return Err(Error::Shape(format!(
                "{} diagonal entries for dimension {dim}",
                diag.len()
            )));
        }
        let mut comps = vec![Expr::constant(0.0); sym_len(dim)];
        for (i, src) in diag.iter().enumerate() {
            comps[sym_index(dim, i, i)] = Expr::parse(src)?;
        }
        Self::from_exprs(dim, comps)
    }

    pub fn black_box(
        dim: usize,
        components: usize,
        label: &str,
        func: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: FieldKind::BlackBox(BlackBox {
                dim,
                components,
                label: label.to_string(),
                func: Arc::new(func),
            }),
            domain: DomainBox::cube(dim, -1.0, 1.0),
        }
    }

    pub fn with_domain(mut self, domain: DomainBox) -> Self {
        self.domain = domain;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FieldKind::Catalog(c) => c.dim(),
            FieldKind::Expression(e) => e.dim,
            FieldKind::Profile(p) => p.dim,
            FieldKind::BlackBox(b) => b.dim,
        }
    }

    pub fn components(&self) -> usize {
        match &self.kind {
            FieldKind::Catalog(c) => c.components(),
            FieldKind::Expression(e) => e.components.len(),
            FieldKind::Profile(p) => match p.role {
                ProfileRole::Metric => sym_len(p.dim),
                ProfileRole::Potential => 1,
            },
            FieldKind::BlackBox(b) => b.components,
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.kind, FieldKind::BlackBox(_))
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            FieldKind::Catalog(c) => c.name(),
            FieldKind::Expression(e) => {
                let parts: Vec<&str> = e.components.iter().map(|c| c.source()).collect();
                if parts.len() == 1 {
                    parts[0].to_string()
                } else {
                    format!("[{}]", parts.join(", "))
                }
            }
            FieldKind::Profile(p) => format!(
                "profile({:?}, n={}, r in [{}, {}])",
                p.role,
                p.dim,
                p.interp.r_lo(),
                p.interp.r_hi()
            ),
            FieldKind::BlackBox(b) => format!("blackbox({})", b.label),
        }
    }

    pub(crate) fn check_domain(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, field dimension is {}",
                p.len(),
                self.dim()
            )));
        }
        if !self.domain.contains(p) {
            return Err(Error::OutOfDomain { point: p.to_vec() });
        }
        Ok(())
    }

    /// Evaluate all components at a (possibly dual-valued) point.
    ///
    /// Black-box fields only accept plain `f64` points; use the jet evaluators.
    pub fn eval_generic<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        match &self.kind {
            FieldKind::Catalog(c) => Ok(c.eval(x)),
            FieldKind::Expression(e) => Ok(e.components.iter().map(|c| c.eval(x)).collect()),
            FieldKind::Profile(p) => p.interp.eval_field(p.role, p.dim, x),
            FieldKind::BlackBox(_) => Err(Error::InvalidParameter(
                "black-box fields have no analytic evaluation".into(),
            )),
        }
    }

    /// Plain evaluation at a real point.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            FieldKind::BlackBox(b) => Ok((b.func)(x)),
            _ => self.eval_generic(x),
        }
    }
}
