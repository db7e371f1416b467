//! Numerical engine for quasi Yamabe gradient solitons
//! `(R − ρ) g = ∇²f − (1/m) df ⊗ df`.
//!
//! - [`jets`]: exact partial derivatives (to order 3) of metric and scalar fields
//! - [`curvature`]: Christoffel symbols, Riemann, Ricci, scalar and Weyl curvature
//! - [`soliton`]: pointwise identity residuals on a chart instance
//! - [`levelset`]: level-surface geometry in the frame adapted to `∇f`
//! - [`construct`]: radial soliton profiles, sphere quadrature, the `L(R_ρ)` chain
//! - [`catalog`]: named built-in instances
//! - [`cli`]: the `yamabe` command-line front end

// `!(x < tol)` is used on purpose so that NaN fails a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod construct;
pub mod curvature;
pub mod error;
pub mod jets;
pub mod levelset;
pub mod soliton;
pub mod tensor;

pub use error::{Error, Result};

/// Version string written into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
