//! Rotationally symmetric solitons from the radial ODE, and the integral
//! checks on closed spheres.

pub mod chain;
pub mod ode;
pub mod profile;
pub mod quadrature;

pub use chain::{chain_check, chain_coefficient, ChainReport, Ratio};
pub use ode::{soliton_ode_rhs, warped_scalar_curvature, State};
pub use profile::{
    integrate_profile, profile_to_instance, Profile, ProfileInterpolant, ProfileParams,
    ProfileStatus,
};
pub use quadrature::{
    quadrature_convergence, weighted_quadrature_check, QuadratureConvergence, QuadratureGrid,
    QuadratureResult,
};
