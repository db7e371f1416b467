//! Radial reduction of the soliton equation on `dr² + φ(r)² g_{S^{n-1}}`.
//!
//! For a radial potential `f(r)` the Hessian is `f''` along `∂_r` and
//! `(φ'/φ) f'` times the metric on the spheres, so the equation splits into
//!
//! ```text
//! radial:      R − ρ = f'' − f'²/m
//! tangential:  R − ρ = (φ'/φ) f'
//! ```
//!
//! and, with `R = −2(n−1)φ''/φ + (n−1)(n−2)(1−φ'²)/φ²`, closes to
//!
//! ```text
//! f''  = (φ'/φ) f' + f'²/m
//! φ''  = [ (n−1)(n−2)(1−φ'²)/φ² − ρ − (φ'/φ) f' ] · φ / (2(n−1))
//! ```

use crate::error::{Error, Result};
use crate::soliton::SolitonParams;

/// `(φ, φ', f, f')`
pub type State = [f64; 4];

/// Right-hand side: returns `(φ', φ'', f', f'')`.
pub fn soliton_ode_rhs(state: &State, n: usize, params: &SolitonParams) -> Result<State> {
    let [phi, dphi, _f, df] = *state;
    if !(phi > 0.0) {
        return Err(Error::PhiNonPositive { phi });
    }
    let nf = n as f64;
    let ratio = dphi / phi;
    let d2f = ratio * df + params.inv_m() * df * df;
    let d2phi =
        ((nf - 1.0) * (nf - 2.0) * (1.0 - dphi * dphi) / (phi * phi) - params.rho - ratio * df)
            * phi
            / (2.0 * (nf - 1.0));
    Ok([dphi, d2phi, df, d2f])
}

/// Scalar curvature of the warped metric from `(φ, φ', φ'')`.
pub fn warped_scalar_curvature(n: usize, phi: f64, dphi: f64, d2phi: f64) -> f64 {
    let nf = n as f64;
    -2.0 * (nf - 1.0) * d2phi / phi + (nf - 1.0) * (nf - 2.0) * (1.0 - dphi * dphi) / (phi * phi)
}

/// One classical fourth-order Runge–Kutta step.
pub(crate) fn rk4_step(state: &State, h: f64, n: usize, params: &SolitonParams) -> Result<State> {
    let add = |a: &State, k: &State, s: f64| -> State {
        [
            a[0] + s * k[0],
            a[1] + s * k[1],
            a[2] + s * k[2],
            a[3] + s * k[3],
        ]
    };
    let k1 = soliton_ode_rhs(state, n, params)?;
    let k2 = soliton_ode_rhs(&add(state, &k1, 0.5 * h), n, params)?;
    let k3 = soliton_ode_rhs(&add(state, &k2, 0.5 * h), n, params)?;
    let k4 = soliton_ode_rhs(&add(state, &k3, h), n, params)?;
    let mut out = *state;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::MParam;

    #[test]
    fn round_sphere_solves_the_system() {
        let p = SolitonParams::new(MParam::Finite(1.0), 6.0).unwrap();
        for r in [0.2f64, 1.0, 2.5] {
            let d = soliton_ode_rhs(&[r.sin(), r.cos(), 0.0, 0.0], 3, &p).unwrap();
            assert!((d[1] + r.sin()).abs() < 1e-14);
            assert_eq!(d[3], 0.0);
            assert!((warped_scalar_curvature(3, r.sin(), r.cos(), -r.sin()) - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_space_is_a_fixed_point() {
        let p = SolitonParams::new(MParam::Finite(1.0), 0.0).unwrap();
        let d = soliton_ode_rhs(&[0.7, 1.0, 0.3, 0.0], 3, &p).unwrap();
        assert_eq!(d, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn infinite_m_drops_quadratic_term() {
        let fin = SolitonParams::new(MParam::Finite(2.0), 1.0).unwrap();
        let inf = SolitonParams::new(MParam::Infinity, 1.0).unwrap();
        let s = [0.5, 0.9, 0.0, 0.4];
        let a = soliton_ode_rhs(&s, 4, &fin).unwrap();
        let b = soliton_ode_rhs(&s, 4, &inf).unwrap();
        assert!((a[3] - b[3] - 0.16 / 2.0).abs() < 1e-15);
        assert_eq!(a[1], b[1]);
    }

    #[test]
    fn non_positive_phi_is_an_error() {
        let p = SolitonParams::new(MParam::Finite(1.0), 0.0).unwrap();
        assert!(matches!(
            soliton_ode_rhs(&[0.0, 1.0, 0.0, 0.0], 3, &p),
            Err(Error::PhiNonPositive { .. })
        ));
    }
}
