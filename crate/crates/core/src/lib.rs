//! Exact U-statistics with verified moment and tail bounds.
//!
//! The crate evaluates U-statistics of symmetric kernels over
//! finite-support laws, computes their Hoeffding decomposition and exact
//! variance, builds fully numeric moment and exponential tail bounds for
//! the normalized statistic, and verifies every bound against brute-force
//! enumeration and seeded Monte Carlo simulation.
//!
//! Layout:
//!
//! - [`model`] — distributions, kernels, exact L_p moments, sampling;
//! - [`ustat`] — U-statistic evaluation and brute-force oracles;
//! - [`hoeffding`] — projection kernels, rank, variance;
//! - [`bounds`] — the explicit constants and the moment bounds;
//! - [`gls`] — moment-growth norms, conjugates, and tail envelopes;
//! - [`montecarlo`] — deterministic parallel simulation and verification;
//! - [`config`] — JSON specs for distributions and kernels.

pub mod bounds;
pub mod config;
pub mod error;
pub mod gls;
pub mod hoeffding;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod ustat;

pub use error::{Error, Result};
