//! Integrated radial profiles and their smooth interpolants.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::Serialize;

use super::ode::{rk4_step, soliton_ode_rhs, warped_scalar_curvature, State};
use crate::error::{Error, Result};
use crate::jets::dual::Scalar;
use crate::jets::field::spherical_diag;
use crate::jets::{DomainBox, FieldKind, FieldSpec, ProfileField, ProfileRole};
use crate::soliton::{MParam, SolitonInstance, SolitonParams};

/// Start radius of the series initial data.
pub const SERIES_START: f64 = 1e-6;
/// Any state component above this magnitude ends the integration.
pub const BLOWUP_LIMIT: f64 = 1e8;
const GRADED_RADIUS: f64 = 0.1;
const MAX_SUBSTEPS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileParams {
    pub n: usize,
    pub m: MParam,
    pub rho: f64,
    /// `f''(0)`
    pub q: f64,
    pub r_max: f64,
    pub h_r: f64,
}

impl ProfileParams {
    pub fn soliton(&self) -> SolitonParams {
        SolitonParams {
            m: self.m,
            rho: self.rho,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileStatus {
    Complete,
    /// `φ` reached zero (a pole) before `r_max`; the profile stops at `r`.
    PhiCollapse {
        r: f64,
    },
    /// The state left `[-1e8, 1e8]` or became non-finite after `r`.
    Blowup {
        r: f64,
    },
}

/// Node arrays over a uniform radial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub d2phi: Vec<f64>,
    pub fval: Vec<f64>,
    pub df: Vec<f64>,
    pub d2f: Vec<f64>,
    pub scalar_r: Vec<f64>,
    pub params: ProfileParams,
    pub status: ProfileStatus,
}

/// Integrate the radial soliton system with classical RK4.
///
/// Starts from the series data `φ(ε) = ε, φ'(ε) = 1, f(ε) = 0, f'(ε) = qε`
/// at `ε = 1e-6` and stores `φ''`, `f''` from the right-hand side at every node.
pub fn integrate_profile(
    n: usize,
    m: MParam,
    rho: f64,
    q: f64,
    r_max: f64,
    h_r: f64,
) -> Result<Profile> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("dimension {n} < 3")));
    }
    let soliton = SolitonParams::new(m, rho)?;
    if !(r_max > SERIES_START) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!("r_max = {r_max}")));
    }
    if !(h_r > 0.0) || h_r > 1e-3 * r_max * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "h_r = {h_r} must lie in (0, 1e-3 * r_max = {}]",
            1e-3 * r_max
        )));
    }
    if !q.is_finite() || !rho.is_finite() {
        return Err(Error::InvalidParameter("q and rho must be finite".into()));
    }
    let params = ProfileParams {
        n,
        m,
        rho,
        q,
        r_max,
        h_r,
    };
    let mut pr = Profile {
        grid: Vec::new(),
        phi: Vec::new(),
        dphi: Vec::new(),
        d2phi: Vec::new(),
        fval: Vec::new(),
        df: Vec::new(),
        d2f: Vec::new(),
        scalar_r: Vec::new(),
        params,
        status: ProfileStatus::Complete,
    };
    let eps = SERIES_START;
    let mut state: State = [eps, 1.0, 0.0, q * eps];
    pr.push_node(eps, &state)?;
    let steps = ((r_max - eps) / h_r + 1e-9).floor() as usize;
    let mut phi_peak = eps;
    for k in 1..=steps {
        let r_prev = eps + (k - 1) as f64 * h_r;
        // the 1/φ² terms are stiff near the center: there, take substeps of
        // size proportional to r·h so the scheme keeps its fourth order
        let substeps = ((GRADED_RADIUS / r_prev).ceil() as usize).clamp(1, MAX_SUBSTEPS);
        let next = (0..substeps).try_fold(state, |s, _| {
            rk4_step(&s, h_r / substeps as f64, n, &soliton)
        });
        let collapse_like = |phi: f64| phi < 0.05 * phi_peak;
        let next = match next {
            Ok(s) => s,
            Err(_) => {
                pr.status = ProfileStatus::PhiCollapse { r: r_prev };
                break;
            }
        };
        let finite = next
            .iter()
            .all(|v| v.is_finite() && v.abs() <= BLOWUP_LIMIT);
        if !finite {
            pr.status = if collapse_like(state[0]) {
                ProfileStatus::PhiCollapse { r: r_prev }
            } else {
                ProfileStatus::Blowup { r: r_prev }
            };
            break;
        }
        if next[0] <= 0.0 {
            pr.status = ProfileStatus::PhiCollapse { r: r_prev };
            break;
        }
        let r = eps + k as f64 * h_r;
        if pr.push_node(r, &next).is_err() {
            pr.status = ProfileStatus::Blowup { r: r_prev };
            break;
        }
        state = next;
        phi_peak = phi_peak.max(state[0]);
    }
    Ok(pr)
}

impl Profile {
    fn push_node(&mut self, r: f64, s: &State) -> Result<()> {
        let d = soliton_ode_rhs(s, self.params.n, &self.params.soliton())?;
        if !d.iter().all(|v| v.is_finite() && v.abs() <= BLOWUP_LIMIT) {
            return Err(Error::InvalidParameter("non-finite derivative".into()));
        }
        self.grid.push(r);
        self.phi.push(s[0]);
        self.dphi.push(s[1]);
        self.d2phi.push(d[1]);
        self.fval.push(s[2]);
        self.df.push(s[3]);
        self.d2f.push(d[3]);
        // the tangential equation; identical to the closed-form curvature on solutions
        self.scalar_r.push(self.params.rho + s[1] / s[0] * s[3]);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn r_end(&self) -> f64 {
        self.grid.last().copied().unwrap_or(0.0)
    }

    /// Smallest radius at which the interpolant may be queried.
    pub fn r_lo(&self) -> f64 {
        self.grid.first().copied().unwrap_or(0.0) + 10.0 * self.params.h_r
    }

    /// Warped scalar curvature from the stored `(φ, φ', φ'')` at node `k`.
    pub fn closed_form_curvature(&self, k: usize) -> f64 {
        warped_scalar_curvature(self.params.n, self.phi[k], self.dphi[k], self.d2phi[k])
    }

    /// Max of the radial and tangential equation residuals at node `k`, using
    /// the closed-form curvature.
    pub fn node_residual(&self, k: usize) -> f64 {
        let rr = self.closed_form_curvature(k) - self.params.rho;
        let inv_m = self.params.m.inv();
        let radial = self.d2f[k] - inv_m * self.df[k] * self.df[k] - rr;
        let tangential = self.dphi[k] / self.phi[k] * self.df[k] - rr;
        radial.abs().max(tangential.abs())
    }

    /// Minimum over nodes (away from the center) of the radial-plane curvature
    /// `−φ''/φ` and the tangential-plane curvature `(1 − φ'²)/φ²`.
    pub fn min_sectional_curvature(&self) -> f64 {
        let lo = self.r_lo();
        (0..self.len())
            .filter(|&k| self.grid[k] >= lo)
            .map(|k| {
                let (p, dp, d2p) = (self.phi[k], self.dphi[k], self.d2phi[k]);
                (-d2p / p).min((1.0 - dp * dp) / (p * p))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn interpolant(&self) -> Result<ProfileInterpolant> {
        ProfileInterpolant::new(self)
    }

    /// Write the CSV export: one row per node, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "r",
            "phi",
            "dphi",
            "d2phi",
            "f",
            "df",
            "d2f",
            "R",
            "residual_max",
        ])?;
        for k in 0..self.len() {
            let row = [
                self.grid[k],
                self.phi[k],
                self.dphi[k],
                self.d2phi[k],
                self.fval[k],
                self.df[k],
                self.d2f[k],
                self.scalar_r[k],
                self.node_residual(k),
            ];
            wr.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Read a CSV export back. The file does not carry `(n, m, ρ)`, so the
    /// caller supplies them; `q`, `h_r` and `r_max` are recovered from the grid.
    pub fn read_csv<R: Read>(r: R, n: usize, m: MParam, rho: f64) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        let want = [
            "r",
            "phi",
            "dphi",
            "d2phi",
            "f",
            "df",
            "d2f",
            "R",
            "residual_max",
        ];
        if header.iter().map(str::trim).ne(want.iter().copied()) {
            return Err(Error::Io(format!("unexpected CSV header: {header:?}")));
        }
        let mut cols: [Vec<f64>; 8] = Default::default();
        for rec in rd.records() {
            let rec = rec?;
            for (c, col) in cols.iter_mut().enumerate() {
                let v: f64 = rec
                    .get(c)
                    .ok_or_else(|| Error::Io("short CSV row".into()))?
                    .trim()
                    .parse()
                    .map_err(|e| Error::Io(format!("bad number in CSV: {e}")))?;
                col.push(v);
            }
        }
        let [grid, phi, dphi, d2phi, fval, df, d2f, scalar_r] = cols;
        if grid.len() < 3 {
            return Err(Error::ProfileTooShort {
                nodes: grid.len(),
                needed: 3,
            });
        }
        let h_r = grid[1] - grid[0];
        for w in grid.windows(2) {
            if ((w[1] - w[0]) - h_r).abs() > 1e-6 * h_r {
                return Err(Error::Io("CSV grid is not uniform".into()));
            }
        }
        let q = df[0] / grid[0];
        let r_max = *grid.last().unwrap_or(&0.0);
        Ok(Self {
            grid,
            phi,
            dphi,
            d2phi,
            fval,
            df,
            d2f,
            scalar_r,
            params: ProfileParams {
                n,
                m,
                rho,
                q,
                r_max,
                h_r,
            },
            status: ProfileStatus::Complete,
        })
    }

    /// Largest disagreement between the stored curvature column and the
    /// warped-product closed form, over nodes away from the center.
    pub fn consistency_defect(&self) -> f64 {
        let lo = self.r_lo();
        (0..self.len())
            .filter(|&k| self.grid[k] >= lo)
            .map(|k| {
                (self.closed_form_curvature(k) - self.scalar_r[k])
                    .abs()
                    .max(self.node_residual(k))
            })
            .fold(0.0, f64::max)
    }
}

/// Piecewise quintic Hermite interpolant of `φ(r)` and `f(r)`.
///
/// Each segment matches value, first and second derivative at both ends. The
/// value increment across a segment is taken from the derivative data
/// (end-corrected trapezoid with a fourth-derivative term) instead of from
/// differencing stored values, so the interpolant's third derivative does not
/// pick up `ulp(φ)/h³` noise.
#[derive(Clone, Debug)]
pub struct ProfileInterpolant {
    n: usize,
    r0: f64,
    h: f64,
    r_lo: f64,
    r_hi: f64,
    phi: Channel,
    f: Channel,
}

#[derive(Clone, Debug)]
struct Channel {
    base: Vec<f64>,
    inc: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Channel {
    fn new(base: &[f64], d1: &[f64], d2: &[f64], h: f64) -> Self {
        let len = base.len();
        // fourth derivative from second differences of the stored second derivative
        let d4: Vec<f64> = (0..len)
            .map(|k| {
                let k = k.clamp(1, len - 2);
                (d2[k + 1] - 2.0 * d2[k] + d2[k - 1]) / (h * h)
            })
            .collect();
        let inc = (0..len - 1)
            .map(|k| {
                0.5 * h * (d1[k] + d1[k + 1])
                    + h * h / 12.0 * (d2[k] - d2[k + 1])
                    + h.powi(4) / 720.0 * (d4[k + 1] - d4[k])
            })
            .collect();
        Self {
            base: base.to_vec(),
            inc,
            d1: d1.to_vec(),
            d2: d2.to_vec(),
        }
    }

    fn eval<S: Scalar>(&self, k: usize, s: S, h: f64) -> S {
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let h1 = s - s3.scale(6.0) + s4.scale(8.0) - s5.scale(3.0);
        let h2 = s2.scale(0.5) - s3.scale(1.5) + s4.scale(1.5) - s5.scale(0.5);
        let h3 = s3.scale(10.0) - s4.scale(15.0) + s5.scale(6.0);
        let h4 = s3.scale(-4.0) + s4.scale(7.0) - s5.scale(3.0);
        let h5 = s3.scale(0.5) - s4 + s5.scale(0.5);
        h3.scale(self.inc[k])
            + (h1.scale(self.d1[k]) + h4.scale(self.d1[k + 1])).scale(h)
            + (h2.scale(self.d2[k]) + h5.scale(self.d2[k + 1])).scale(h * h)
            + S::cst(self.base[k])
    }
}

impl ProfileInterpolant {
    pub fn new(pr: &Profile) -> Result<Self> {
        if pr.len() < 12 {
            return Err(Error::ProfileTooShort {
                nodes: pr.len(),
                needed: 12,
            });
        }
        let h = pr.params.h_r;
        Ok(Self {
            n: pr.params.n,
            r0: pr.grid[0],
            h,
            r_lo: pr.r_lo(),
            r_hi: pr.r_end(),
            phi: Channel::new(&pr.phi, &pr.dphi, &pr.d2phi, h),
            f: Channel::new(&pr.fval, &pr.df, &pr.d2f, h),
        })
    }

    pub fn r_lo(&self) -> f64 {
        self.r_lo
    }

    pub fn r_hi(&self) -> f64 {
        self.r_hi
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn locate<S: Scalar>(&self, r: S) -> Result<(usize, S)> {
        let rv = r.re();
        if !(rv >= self.r_lo && rv <= self.r_hi) {
            return Err(Error::OutOfProfileRange {
                r: rv,
                lo: self.r_lo,
                hi: self.r_hi,
            });
        }
        let segs = self.phi.inc.len();
        let k = (((rv - self.r0) / self.h).floor() as usize).min(segs - 1);
        let rk = self.r0 + k as f64 * self.h;
        Ok((k, (r.add_cst(-rk)).scale(1.0 / self.h)))
    }

    pub fn phi<S: Scalar>(&self, r: S) -> Result<S> {
        let (k, s) = self.locate(r)?;
        Ok(self.phi.eval(k, s, self.h))
    }

    pub fn f<S: Scalar>(&self, r: S) -> Result<S> {
        let (k, s) = self.locate(r)?;
        Ok(self.f.eval(k, s, self.h))
    }

    pub(crate) fn eval_field<S: Scalar>(
        &self,
        role: ProfileRole,
        dim: usize,
        x: &[S],
    ) -> Result<Vec<S>> {
        match role {
            ProfileRole::Metric => Ok(spherical_diag(dim, x, S::cst(1.0), self.phi(x[0])?)),
            ProfileRole::Potential => Ok(vec![self.f(x[0])?]),
        }
    }

    /// Chart box: `r ∈ [r_lo, r_hi]`, polar angles in `[0, π]`, azimuth in `[−π, π]`.
    pub fn domain(&self) -> DomainBox {
        use std::f64::consts::PI;
        let mut b = DomainBox::cube(self.n, 0.0, PI);
        b.lo[0] = self.r_lo;
        b.hi[0] = self.r_hi;
        b.lo[self.n - 1] = -PI;
        b.hi[self.n - 1] = PI;
        b
    }
}

/// Expose a profile as a soliton instance on the hyperspherical chart
/// `(r, θ1, …, θ_{n-1})`.
pub fn profile_to_instance(pr: &Profile) -> Result<SolitonInstance> {
    let interp = Arc::new(pr.interpolant()?);
    let interp_lo = interp.r_lo();
    let n = pr.params.n;
    let domain = interp.domain();
    let metric = FieldSpec {
        kind: FieldKind::Profile(ProfileField {
            dim: n,
            role: ProfileRole::Metric,
            interp: interp.clone(),
        }),
        domain: domain.clone(),
    };
    let potential = FieldSpec {
        kind: FieldKind::Profile(ProfileField {
            dim: n,
            role: ProfileRole::Potential,
            interp,
        }),
        domain: domain.clone(),
    };
    let name = format!(
        "WARP{n}(m={}, rho={}, q={}, h_r={})",
        pr.params.m, pr.params.rho, pr.params.q, pr.params.h_r
    );
    let inst = SolitonInstance::new(name, metric, potential, pr.params.soliton())?;
    let sample_box = profile_sample_box(n, interp_lo, pr.r_end());
    Ok(inst.with_sample_box(sample_box))
}

/// Angular margin kept from the chart poles when sampling.
pub const ANGLE_MARGIN: f64 = 0.3;

/// `r ∈ [max(r_lo, 0.1), 0.95 r_end]`, angles at least [`ANGLE_MARGIN`] from
/// the poles and from the azimuth seam.
pub fn profile_sample_box(n: usize, r_lo: f64, r_end: f64) -> DomainBox {
    use std::f64::consts::PI;
    let mut b = DomainBox::cube(n, ANGLE_MARGIN, PI - ANGLE_MARGIN);
    b.lo[0] = r_lo.max(0.1);
    b.hi[0] = (0.95 * r_end).max(b.lo[0]);
    b.lo[n - 1] = -PI + ANGLE_MARGIN;
    b.hi[n - 1] = PI - ANGLE_MARGIN;
    b
}
