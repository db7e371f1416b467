//! The pointwise identity for `L(R_ρ)` along a radial profile:
//!
//! ```text
//! L(R_ρ) = [1/m − 1/(2(n−1))] R_ρ' f' + (n/m) R_ρ² − R_ρ R/(n−1)
//! ```
//!
//! with `ΔR_ρ = R_ρ'' + (n−1)(φ'/φ) R_ρ'` from central differences of the
//! stored curvature column.

use serde::Serialize;

use super::profile::Profile;
use crate::error::{Error, Result};
use crate::jets::Point;
use crate::soliton::ResidualReport;

pub const CHAIN_TOLERANCE: f64 = 1e-4;
/// Nodes closer than this many steps to the center are skipped.
const CENTER_SKIP: usize = 10;

/// Reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let s = den.signum();
        Self {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn int(v: i64) -> Self {
        Self::new(v, 1)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::ops::Add for Ratio {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
}

impl std::ops::Mul for Ratio {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.num * o.num, self.den * o.den)
    }
}

impl std::ops::Neg for Ratio {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.num, self.den)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Coefficient of `∫ R_ρ² dμ` after integrating the chain over a closed manifold.
///
/// Write the right side as `a R_ρ' f' + b R_ρ² + c R_ρ R` with
/// `a = 1/m − 1/(2(n−1))`, `b = n/m`, `c = −1/(n−1)`. Integrating by parts
/// turns `∫ R_ρ' f'` into `−∫ R_ρ L(f) = −n ∫ R_ρ²`, and `∫ R_ρ R = ∫ R_ρ²`
/// since `∫ R_ρ = ∫ L(f)/n = 0`. The total `−n a + b + c` is independent of
/// `m`; the `1/m` parts are tracked separately and checked to cancel.
pub fn chain_coefficient(n: usize) -> Ratio {
    let nn = n as i64;
    let half_inv = Ratio::new(1, 2 * (nn - 1));
    // (coefficient of 1/m, constant part)
    let a = (Ratio::int(1), -half_inv);
    let b = (Ratio::int(nn), Ratio::int(0));
    let c = (Ratio::int(0), Ratio::new(-1, nn - 1));
    let minus_n = Ratio::int(-nn);
    let inv_m_part = minus_n * a.0 + b.0 + c.0;
    debug_assert_eq!(inv_m_part, Ratio::int(0));
    minus_n * a.1 + b.1 + c.1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub report: ResidualReport,
    pub coefficient: Ratio,
    pub interior_nodes: usize,
}

pub fn chain_check(pr: &Profile) -> Result<ChainReport> {
    chain_check_with(pr, CHAIN_TOLERANCE)
}

pub fn chain_check_with(pr: &Profile, tol: f64) -> Result<ChainReport> {
    let len = pr.len();
    let lo = CENTER_SKIP;
    let interior = len.saturating_sub(lo + 1);
    if interior < 10 {
        return Err(Error::ProfileTooShort {
            nodes: len,
            needed: lo + 11,
        });
    }
    let n = pr.params.n;
    let nf = n as f64;
    let inv_m = pr.params.m.inv();
    let rho = pr.params.rho;
    let h = pr.params.h_r;
    let rr = |k: usize| pr.scalar_r[k] - rho;
    let mut worst = 0.0f64;
    let mut at = lo;
    let mut sq = 0.0;
    for k in lo..len - 1 {
        let d1 = (rr(k + 1) - rr(k - 1)) / (2.0 * h);
        let d2 = (rr(k + 1) - 2.0 * rr(k) + rr(k - 1)) / (h * h);
        let lap = d2 + (nf - 1.0) * pr.dphi[k] / pr.phi[k] * d1;
        let df = pr.df[k];
        let l = lap - inv_m * d1 * df;
        let r = rr(k);
        let rhs = (inv_m - 1.0 / (2.0 * (nf - 1.0))) * d1 * df + nf * inv_m * r * r
            - r * pr.scalar_r[k] / (nf - 1.0);
        let res = (l - rhs).abs();
        sq += res * res;
        if !(res <= worst) {
            worst = res;
            at = k;
        }
    }
    let point = Point::new(radial_point(n, pr.grid[at]))?;
    Ok(ChainReport {
        report: ResidualReport::new("weighted_operator_chain", worst, sq.sqrt(), tol, &point),
        coefficient: chain_coefficient(n),
        interior_nodes: interior,
    })
}

/// `(r, π/2, …, π/2, 0)`
pub(crate) fn radial_point(n: usize, r: f64) -> Vec<f64> {
    let mut p = vec![std::f64::consts::FRAC_PI_2; n];
    p[0] = r;
    p[n - 1] = 0.0;
    p
}
