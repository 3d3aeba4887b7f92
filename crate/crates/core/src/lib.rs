//! Numerical geometric tomography for star and convex bodies.
//!
//! The crate represents bodies by radial evaluators and provides section and
//! projection functionals, their distribution functions over Haar measure,
//! the spherical Radon transform with its harmonic inversion, and numerical
//! checkers for the classical volume inequalities.
//!
//! Module map:
//! - [`sphere`]: sampling and quadrature on spheres and Grassmannians.
//! - [`body`]: body constructions and validity checks.
//! - [`harmonic`]: expansions, Fourier multipliers, Radon transform.
//! - [`functionals`]: volume, sections, shadows, fractional derivatives.
//! - [`dist`]: empirical distribution functions and comparisons.
//! - [`inequality`]: Busemann, Petty, Blaschke-Santalo, section-bound checks.

pub mod body;
pub mod dist;
pub mod error;
pub mod functionals;
pub mod harmonic;
pub mod inequality;
pub mod special;
pub mod sphere;

pub use error::{GtomoError, Result};
