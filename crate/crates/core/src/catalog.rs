//! Named built-in instances.
//!
//! | name | metric | default potential | m | ρ |
//! |---|---|---|---|---|
//! | `HALF_STEADY` | flat `R³`, `x1 ∈ [−0.5, 1]` | `−2 ln(1 + x1)` | 2 | 0 |
//! | `FLAT3` | flat `R³` | `x1` | ∞ | 0 |
//! | `POLARFLAT3` | flat `R³`, polar chart | `r²/2` | ∞ | 0 |
//! | `SPHERE3` | unit `S³`, stereographic | `0` | 1 | 6 |
//! | `SPHEREPOLAR3` | unit `S³`, hyperspherical | `0` | 1 | 6 |
//! | `HYP3` | `x3⁻² δ` | `0` | 1 | −6 |
//! | `CONF3` | `e^{2 x1} δ` | `x1 x2` | 1 | 0 |
//! | `CONF4` | `e^{0.6 sin x1 cos x2} δ` | `x1` | 1 | 0 |
//! | `PRODUCT4` | `S²(1) × R²` | `x1` | 1 | 0 |
//! | `RANDOMPOLY{3,4,5}` | `δ + 0.05 A(x)`, seeded | seeded cubic | 1 | 0 |
//! | `WARP{3,4,5}` | integrated profile | profile `f(r)` | 1 | 1 |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construct::profile::{integrate_profile, profile_to_instance, Profile};
use crate::error::{Error, Result};
use crate::jets::{is_positive_definite, CatalogField, DomainBox, Expr, FieldSpec};
use crate::soliton::{MParam, SolitonInstance, SolitonParams};
use crate::tensor::Matrix;

pub const NAMES: &[&str] = &[
    "HALF_STEADY",
    "FLAT3",
    "POLARFLAT3",
    "SPHERE3",
    "SPHEREPOLAR3",
    "HYP3",
    "CONF3",
    "CONF4",
    "PRODUCT4",
    "RANDOMPOLY3",
    "RANDOMPOLY4",
    "RANDOMPOLY5",
    "WARP3",
    "WARP4",
    "WARP5",
];

/// Scale of the random perturbation in `RANDOMPOLY`.
pub const RANDOM_EPS: f64 = 0.05;
/// Radial extent and step of the `WARP` profiles.
pub const WARP_R_MAX: f64 = 1.5;
pub const WARP_H_R: f64 = 1.5e-3;
const PD_PROBES: usize = 256;
const MAX_REDRAWS: u64 = 64;

/// Overrides applied on top of a catalog entry's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CatalogOptions {
    pub seed: u64,
    pub m: Option<MParam>,
    pub rho: Option<f64>,
    /// closed-form potential replacing the default
    pub potential: Option<String>,
    /// `f''(0)` for `WARP` entries
    pub q: Option<f64>,
    pub r_max: Option<f64>,
    pub h_r: Option<f64>,
}

pub fn is_known(name: &str) -> bool {
    NAMES.contains(&name.to_ascii_uppercase().as_str())
}

/// Build a catalog instance.
pub fn instance(name: &str, opts: &CatalogOptions) -> Result<SolitonInstance> {
    let upper = name.to_ascii_uppercase();
    let expr_pot = |n: usize, src: &str| FieldSpec::scalar_expr(n, src);
    let (label, metric, potential, m, rho) = match upper.as_str() {
        "HALF_STEADY" => {
            let mut b = DomainBox::cube(3, -1.0, 1.0);
            b.lo[0] = -0.5;
            let metric = FieldSpec::catalog(CatalogField::Flat { dim: 3 }).with_domain(b);
            let m = opts.m.unwrap_or(MParam::Finite(2.0));
            let src = match m {
                MParam::Finite(v) => format!("-({v})*ln(1+x1)"),
                MParam::Infinity => "x1".to_string(),
            };
            (upper.clone(), metric, expr_pot(3, &src)?, m, 0.0)
        }
        "FLAT3" => (
            upper.clone(),
            FieldSpec::catalog(CatalogField::Flat { dim: 3 }),
            expr_pot(3, "x1")?,
            MParam::Infinity,
            0.0,
        ),
        "POLARFLAT3" => {
            let metric = FieldSpec::catalog(CatalogField::PolarFlat { dim: 3 });
            let pot = expr_pot(3, "x1*x1/2")?.with_domain(metric.domain.clone());
            (upper.clone(), metric, pot, MParam::Infinity, 0.0)
        }
        "SPHERE3" => (
            upper.clone(),
            FieldSpec::catalog(CatalogField::Sphere {
                dim: 3,
                radius: 1.0,
            }),
            expr_pot(3, "0")?,
            MParam::Finite(1.0),
            6.0,
        ),
        "SPHEREPOLAR3" => {
            let metric = FieldSpec::catalog(CatalogField::SpherePolar {
                dim: 3,
                radius: 1.0,
            });
            let pot = expr_pot(3, "0")?.with_domain(metric.domain.clone());
            (upper.clone(), metric, pot, MParam::Finite(1.0), 6.0)
        }
        "HYP3" => {
            let metric = FieldSpec::catalog(CatalogField::Hyperbolic { dim: 3 });
            let pot = expr_pot(3, "0")?.with_domain(metric.domain.clone());
            (upper.clone(), metric, pot, MParam::Finite(1.0), -6.0)
        }
        "CONF3" => (
            upper.clone(),
            FieldSpec::catalog(CatalogField::Conformal {
                base: Box::new(CatalogField::Flat { dim: 3 }),
                u: Expr::parse("x1")?,
            }),
            expr_pot(3, "x1*x2")?,
            MParam::Finite(1.0),
            0.0,
        ),
        "CONF4" => (
            upper.clone(),
            FieldSpec::catalog(CatalogField::Conformal {
                base: Box::new(CatalogField::Flat { dim: 4 }),
                u: Expr::parse("0.3*sin(x1)*cos(x2)")?,
            }),
            expr_pot(4, "x1")?,
            MParam::Finite(1.0),
            0.0,
        ),
        "PRODUCT4" => (
            upper.clone(),
            FieldSpec::catalog(CatalogField::SphereProduct {
                sphere_dim: 2,
                flat_dim: 2,
            }),
            expr_pot(4, "x1")?,
            MParam::Finite(1.0),
            0.0,
        ),
        "RANDOMPOLY3" | "RANDOMPOLY4" | "RANDOMPOLY5" => {
            let n: usize = upper[10..]
                .parse()
                .map_err(|_| Error::InvalidParameter(upper.clone()))?;
            let (metric, seed) = random_metric(n, opts.seed)?;
            let pot = FieldSpec::catalog(CatalogField::random_cubic(n, seed));
            (
                format!("{upper}(seed={seed})"),
                metric,
                pot,
                MParam::Finite(1.0),
                0.0,
            )
        }
        "WARP3" | "WARP4" | "WARP5" => {
            let n: usize = upper[4..]
                .parse()
                .map_err(|_| Error::InvalidParameter(upper.clone()))?;
            let pr = warp_profile(n, opts)?;
            if opts.potential.is_some() {
                return Err(Error::InvalidParameter(
                    "WARP instances take their potential from the profile".into(),
                ));
            }
            return profile_to_instance(&pr);
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown catalog instance '{name}' (known: {})",
                NAMES.join(", ")
            )))
        }
    };
    let m = opts.m.unwrap_or(m);
    let rho = opts.rho.unwrap_or(rho);
    let potential = match &opts.potential {
        Some(src) => FieldSpec::scalar_expr(metric.dim(), src)?.with_domain(metric.domain.clone()),
        None => potential,
    };
    let params = SolitonParams::new(m, rho)?;
    let inst = SolitonInstance::new(label, metric, potential, params)?;
    let sample = default_sample_box(&inst);
    Ok(inst.with_sample_box(sample))
}

/// Integrate the profile behind a `WARP{n}` entry.
pub fn warp_profile(n: usize, opts: &CatalogOptions) -> Result<Profile> {
    let m = opts.m.unwrap_or(MParam::Finite(1.0));
    let rho = opts.rho.unwrap_or(1.0);
    let q = opts.q.unwrap_or(0.5);
    integrate_profile(
        n,
        m,
        rho,
        q,
        opts.r_max.unwrap_or(WARP_R_MAX),
        opts.h_r.unwrap_or(WARP_H_R),
    )
}

/// `RANDOMPOLY` metric, redrawn with the next seed until positive definite on
/// a probe set of the unit box. Returns the metric and the seed used.
pub fn random_metric(n: usize, seed: u64) -> Result<(FieldSpec, u64)> {
    for k in 0..MAX_REDRAWS {
        let s = seed.wrapping_add(k);
        let field = FieldSpec::catalog(CatalogField::random_poly(n, s, RANDOM_EPS));
        if positive_on_probes(&field, s)? {
            return Ok((field, s));
        }
    }
    Err(Error::NotPositiveDefinite { point: vec![] })
}

fn positive_on_probes(field: &FieldSpec, seed: u64) -> Result<bool> {
    let n = field.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut probes: Vec<Vec<f64>> = (0..PD_PROBES)
        .map(|_| field.domain.sample(&mut rng))
        .collect();
    // include the corners, where the cubic terms are largest
    for c in 0..(1usize << n) {
        probes.push(
            (0..n)
                .map(|i| if c & (1 << i) != 0 { 1.0 } else { -1.0 })
                .collect(),
        );
    }
    for p in probes {
        let comps = field.eval(&p)?;
        let g = Matrix::from_fn(n, |[i, j]| {
            comps[crate::jets::sym_index(n, i.min(j), i.max(j))]
        });
        if !is_positive_definite(&g) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Margin used for non-profile instances: `1e-3` from the box edges; polar
/// charts additionally keep `0.3` from the poles.
fn default_sample_box(inst: &SolitonInstance) -> DomainBox {
    use std::f64::consts::PI;
    let mut b = inst.domain.shrink(1e-3);
    let polar = matches!(
        &inst.metric.kind,
        crate::jets::FieldKind::Catalog(CatalogField::PolarFlat { .. })
            | crate::jets::FieldKind::Catalog(CatalogField::SpherePolar { .. })
    );
    if polar {
        let n = b.dim();
        for i in 1..n {
            b.lo[i] = b.lo[i].max(if i + 1 == n { -PI + 0.3 } else { 0.3 });
            b.hi[i] = b.hi[i].min(PI - 0.3);
        }
        b.lo[0] = b.lo[0].max(0.3);
        if let crate::jets::FieldKind::Catalog(CatalogField::SpherePolar { .. }) = &inst.metric.kind
        {
            b.hi[0] = b.hi[0].min(PI - 0.3);
        } else {
            b.hi[0] = b.hi[0].min(3.0);
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_static_name_builds() {
        for name in NAMES.iter().filter(|n| !n.starts_with("WARP")) {
            let inst = instance(name, &CatalogOptions::default()).unwrap();
            assert!(inst.dim() >= 3, "{name}");
        }
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(instance("NOPE", &CatalogOptions::default()).is_err());
    }

    #[test]
    fn overrides_apply() {
        let o = CatalogOptions {
            rho: Some(0.0),
            potential: Some("x1".into()),
            ..Default::default()
        };
        let inst = instance("SPHERE3", &o).unwrap();
        assert_eq!(inst.params.rho, 0.0);
    }
}
