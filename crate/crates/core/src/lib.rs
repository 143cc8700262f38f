//! Numerical library for convolution-type stochastic Volterra equations
//! driven by additive Hilbert-valued fractional Brownian motion.
//!
//! The building blocks, bottom to top:
//!
//! - [`fbm`]: exact sampling and covariance of real-valued fractional
//!   Brownian motion for any Hurst parameter in (0,1).
//! - [`fraccalc`]: Riemann-Liouville fractional integrals and derivatives
//!   on uniformly sampled functions, including the weighted right-sided
//!   operator that appears in the fractional Itô isometry.
//! - [`resolvent`]: scalar resolvent (solution-operator) equations per
//!   eigenmode, with Mittag-Leffler/exponential/cosine closed-form oracles.
//! - [`spectral`]: truncated eigenbasis model of the Hilbert space (trace
//!   class noise covariance, operator spectrum) and Hilbert-valued fBm.
//! - [`stochconv`]: stochastic integrals, the stochastic convolution
//!   `X(t) = ∫₀ᵗ S(t−s) F(s) dB^H(s)`, and weak-solution paths.
//! - [`covariance`]: the analytic covariance engine built on the fractional
//!   Itô isometry, in both the fractional-derivative form (any `H`) and the
//!   double-integral form (`H > 1/2`).
//! - [`validation`]: Monte Carlo moment accumulation and statistical
//!   comparison of empirical covariances against the analytic formulas.
//!
//! Everything works in coordinates with respect to a shared eigenbasis of
//! the noise covariance; eigenfunctions are never materialized.

pub mod covariance;
pub mod error;
pub mod fbm;
pub mod fraccalc;
pub mod grid;
pub mod resolvent;
pub mod rng;
pub mod spectral;
pub mod stochconv;
pub mod validation;

mod quad;

pub use error::{Error, Result};
pub use fraccalc::{SampledFunction, Side};
pub use fbm::{FbmPath, FbmSampler, HurstParameter, SamplerMethod};
pub use grid::TimeGrid;
