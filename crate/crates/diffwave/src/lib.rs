//! Numerical operators for the time-fractional diffusion-wave equation
//! `u_xx = D_{0y}^alpha u` on a strip, `0 < alpha < 2`, together with the
//! wave-equation limit.
//!
//! The crate provides, bottom to top:
//!
//! * [`special`] — the Wright function of the second kind `phi(-beta, mu; z)`
//!   with controlled absolute error, the reciprocal gamma function and the
//!   fundamental solution of the equation;
//! * [`frac`] — Riemann-Liouville fractional integro-differentiation of
//!   one-dimensional function handles;
//! * [`ops`] — the integral operator families `N` (space) and `R` (time)
//!   built on the Wright kernels, with their composition and integration
//!   identities exposed for verification;
//! * [`nonlocal`] — the necessary non-local boundary conditions binding the
//!   boundary traces of a regular solution, and their wave-equation limits;
//! * [`samarskii`] — the explicit solver for the problem with a two-point
//!   combination condition and the Samarskii integral condition;
//! * [`wave`] — the d'Alembert solver for the wave-equation analogue;
//! * [`grid`] — rectangular grid evaluation (rayon-parallel when the
//!   `parallel` feature is enabled, the default).

pub mod error;
pub mod frac;
pub mod func;
pub mod grid;
pub mod nonlocal;
pub mod ops;
pub mod quad;
pub mod samarskii;
pub mod special;
pub mod wave;
pub mod xprec;

pub use error::Error;
