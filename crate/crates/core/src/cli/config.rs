//! TOML run configuration. Every table and key is optional; unknown keys are
//! rejected. Command-line flags override the file.
//!
//! ```toml
//! [instance]
//! catalog = "WARP3"          # or an inline instance:
//! # dim = 3
//! # metric = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "exp(2*x1)"]]
//! # potential = "x1*x2"
//! # constants = { a = 0.5 }
//! # domain = { lo = [-1, -1, -1], hi = [1, 1, 1] }
//! m = "inf"                  # number or "inf"
//! rho = 0.0
//! seed = 7                   # RANDOMPOLY seed
//! q = 0.5                    # WARP entries: f''(0), r_max, h_r
//!
//! [sampling]
//! count = 20
//! seed = 0
//! margin = 0.0               # extra inset of the sample box
//!
//! [tolerances]
//! algebraic = 1e-9           # relative to the size of the compared tensors
//! soliton = 1e-6
//! levelset = 1e-6
//! quadrature = 1e-6
//! chain = 1e-4
//!
//! [verify]
//! suites = ["algebraic", "soliton", "levelset", "quadrature"]
//!
//! [levelset]
//! levels = 4
//! per_level = 12
//! from_profile = "warp3.csv" # with n, m, rho describing the CSV
//!
//! [construct]
//! n = 3
//! m = 1
//! rho = 1.0
//! q = 0.5
//! r_max = 1.5
//! h_r = 1.5e-3
//! csv = "profile.csv"
//!
//! [quadrature]
//! f = "cos(x1)"
//! u = "sin(x1)*cos(x2)"
//! v = "cos(x1)"
//! resolutions = [12, 24, 48]
//!
//! [output]
//! report = "report.json"     # stdout when absent
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::catalog::{self, CatalogOptions};
use crate::error::{Error, Result};
use crate::jets::{sym_index, sym_len, DomainBox, Expr, FieldSpec};
use crate::soliton::{MParam, SolitonInstance, SolitonParams};

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub instance: InstanceConfig,
    pub sampling: SamplingConfig,
    pub tolerances: Tolerances,
    pub verify: VerifyConfig,
    pub levelset: LevelsetConfig,
    pub construct: ConstructConfig,
    pub quadrature: QuadratureConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&src)
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceConfig {
    pub catalog: Option<String>,
    pub dim: Option<usize>,
    pub metric: Option<Vec<Vec<String>>>,
    pub potential: Option<String>,
    pub constants: BTreeMap<String, f64>,
    pub domain: Option<DomainConfig>,
    pub m: Option<MParam>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
    pub q: Option<f64>,
    pub r_max: Option<f64>,
    pub h_r: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub count: usize,
    pub seed: u64,
    pub margin: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            count: 20,
            seed: 0,
            margin: 0.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub algebraic: f64,
    pub soliton: f64,
    pub levelset: f64,
    pub quadrature: f64,
    pub chain: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-9,
            soliton: 1e-6,
            levelset: 1e-6,
            quadrature: 1e-6,
            chain: crate::construct::chain::CHAIN_TOLERANCE,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebraic,
    Soliton,
    Levelset,
    Quadrature,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suites: vec![Suite::Algebraic, Suite::Soliton],
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LevelsetConfig {
    pub levels: usize,
    pub per_level: usize,
    pub from_profile: Option<PathBuf>,
    pub n: usize,
    pub m: MParam,
    pub rho: f64,
}

impl Default for LevelsetConfig {
    fn default() -> Self {
        Self {
            levels: 4,
            per_level: 12,
            from_profile: None,
            n: 3,
            m: MParam::Finite(1.0),
            rho: 1.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructConfig {
    pub n: usize,
    pub m: MParam,
    pub rho: f64,
    pub q: f64,
    pub r_max: f64,
    pub h_r: f64,
    pub csv: Option<PathBuf>,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        Self {
            n: 3,
            m: MParam::Finite(1.0),
            rho: 1.0,
            q: 0.5,
            r_max: catalog::WARP_R_MAX,
            h_r: catalog::WARP_H_R,
            csv: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub f: String,
    pub u: String,
    pub v: String,
    /// defaults to `[12, 24, 48]` on `S³` and `[6, 12]` above
    pub resolutions: Option<Vec<usize>>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            f: "cos(x1)".into(),
            u: "sin(x1)*cos(x2)".into(),
            v: "cos(x1)".into(),
            resolutions: None,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
}

impl InstanceConfig {
    /// Build the instance described by this table, then inset its sample box
    /// by `margin`.
    pub fn build(&self, margin: f64) -> Result<SolitonInstance> {
        let inst = match (&self.catalog, &self.metric) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter(
                    "give either instance.catalog or instance.metric, not both".into(),
                ))
            }
            (Some(name), None) => {
                if self.dim.is_some() || self.domain.is_some() || !self.constants.is_empty() {
                    return Err(Error::InvalidParameter(
                        "dim, domain and constants apply to inline instances only".into(),
                    ));
                }
                let opts = CatalogOptions {
                    seed: self.seed.unwrap_or(0),
                    m: self.m,
                    rho: self.rho,
                    potential: self.potential.clone(),
                    q: self.q,
                    r_max: self.r_max,
                    h_r: self.h_r,
                };
                catalog::instance(name, &opts)?
            }
            (None, Some(rows)) => self.inline(rows)?,
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "no instance: set a catalog name or an inline metric".into(),
                ))
            }
        };
        if !(margin >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling margin {margin} < 0"
            )));
        }
        let b = inst.sample_box.shrink(margin);
        if b.lo.iter().zip(&b.hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidParameter(format!(
                "sampling margin {margin} empties the sample box"
            )));
        }
        Ok(inst.with_sample_box(b))
    }

    fn inline(&self, rows: &[Vec<String>]) -> Result<SolitonInstance> {
        let n = self.dim.unwrap_or(rows.len());
        if n < 3 {
            return Err(Error::InvalidParameter(format!("dimension {n} < 3")));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "instance.metric must be a {n}×{n} array of expressions"
            )));
        }
        let parse = |s: &str| Expr::parse_with(s, &self.constants);
        let mut comps = vec![Expr::constant(0.0); sym_len(n)];
        for i in 0..n {
            for j in i..n {
                if rows[i][j].trim() != rows[j][i].trim() {
                    return Err(Error::InvalidParameter(format!(
                        "instance.metric is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                comps[sym_index(n, i, j)] = parse(&rows[i][j])?;
            }
        }
        let mut metric = FieldSpec::from_exprs(n, comps)?;
        let pot_src = self.potential.as_deref().unwrap_or("0");
        let mut potential = FieldSpec::from_exprs(n, vec![parse(pot_src)?])?;
        if let Some(d) = &self.domain {
            if d.lo.len() != n || d.hi.len() != n || d.lo.iter().zip(&d.hi).any(|(a, b)| !(a < b)) {
                return Err(Error::InvalidParameter(format!(
                    "instance.domain needs {n} bounds with lo < hi"
                )));
            }
            let b = DomainBox {
                lo: d.lo.clone(),
                hi: d.hi.clone(),
            };
            metric = metric.with_domain(b.clone());
            potential = potential.with_domain(b);
        }
        let params = SolitonParams::new(
            self.m.unwrap_or(MParam::Finite(1.0)),
            self.rho.unwrap_or(0.0),
        )?;
        let inst = SolitonInstance::new("inline", metric, potential, params)?;
        let b = inst.domain.shrink(1e-3);
        Ok(inst.with_sample_box(b))
    }
}
