//! Explicit Berry–Esseen bounds for nonlinear statistics `T = W + Δ`.
//!
//! The crate computes the uniform and non-uniform bounds for statistics
//! decomposed into a sum of independent terms `W = Σ g_i(X_i)` plus a
//! remainder `Δ`, estimates the ingredients by quadrature or seeded Monte
//! Carlo, and checks measured Kolmogorov distances against the bounds.
//!
//! * [`bound_core`]: β, δ choices, general uniform and non-uniform bounds.
//! * [`models`]: U-statistics, multisample U-statistics, L-statistics, the
//!   singular-perturbation counterexample, and plain linear sums.
//! * [`mc`]: seeded replicate engine, component estimation, KS distances.
//! * [`app_bounds`]: closed-form bounds for the built-in statistic families.
//! * [`lab`]: configuration-driven experiment runner behind the `be-lab` CLI.

pub mod app_bounds;
pub mod bound_core;
pub mod dist;
pub mod error;
pub mod lab;
pub mod mc;
pub mod models;
pub mod numeric;

pub use error::{Error, Result};
