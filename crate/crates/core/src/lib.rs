//! Second-order numerics for stationary long-memory processes observed along
//! a random walk of sampling times.
//!
//! A process `X` is read at times `T_n = Δ_1 + ... + Δ_n` where the integer
//! intervals `Δ_j ≥ 1` are i.i.d. with law `S`, giving `Y_n = X_{T_n}`. The
//! crate computes the covariance of `Y` exactly (through the convolution
//! powers of `S`) and by Monte Carlo, predicts how the memory parameter `d`
//! changes, evaluates spectral densities under deterministic aliasing and
//! random sampling, and estimates `d` from simulated trajectories.
//!
//! Modules:
//!
//! - [`procgen`]: FARIMA and generalized fractional (Gegenbauer) models,
//!   moving-average coefficients, autocovariances, Gaussian trajectories.
//! - [`samplaw`]: sampling laws, random walks, convolution powers,
//!   characteristic functions.
//! - [`covmap`]: covariance of the sampled process, memory-regime
//!   prediction, decay-exponent fits.
//! - [`specmap`]: spectral densities, aliasing, singularity folding, and the
//!   Poisson-kernel representation of the sampled spectrum.
//! - [`memest`]: empirical autocovariance, periodogram, GPH and FEXP.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod covmap;
pub mod error;
pub mod math;
pub mod memest;
pub mod procgen;
pub mod rng;
pub mod samplaw;
pub mod specmap;

pub use error::{Error, Result};
