//! Numerical laboratory for the spectra of products of independent random
//! matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`numlin`]: dense complex matrices and the eigenvalue / singular value
//!   machinery everything else is built on.
//! * [`ensembles`]: atom distributions, iid matrices, Haar unitaries,
//!   truncated-unitary products and normalized Ginibre-type products.
//! * [`linearize`]: the block linearization `Y(z)`, its Hermitization
//!   `W(z)` and the M-th root eigenvalue process.
//! * [`dpp_exact`]: exact finite-n determinantal formulas: normalization
//!   constants, kernels, rotary-flow sums, cumulants and limiting covariances.
//! * [`spectra_stats`]: linear statistics, test-function analytics,
//!   predicted variances, empirical cumulants and the Monte Carlo checks.

pub mod dpp_exact;
pub mod ensembles;
mod error;
pub mod linearize;
pub mod numlin;
pub mod quad;
pub mod special;
pub mod spectra_stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
