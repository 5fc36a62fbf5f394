//! Full second-order analysis of the widely linear (WL) MVDR beamformer and
//! its strictly linear counterpart, the Capon beamformer, for noncircular
//! interference.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex kernels (LU solves, 2×2 inverse, quadratic forms).
//! - [`scenario`]: array geometry, steering vectors and the scalar spatial
//!   coefficients (ε_s, ε, α_ps, |α_Is|², α_I², α_w, Δ).
//! - [`signal`]: UQPSK waveforms, circular noise, I/Q imbalance and snapshot synthesis.
//! - [`stats`]: covariance / complementary covariance of the total noise and
//!   the block-inverse components `A`, `D` of the augmented covariance.
//! - [`beamform`]: Capon and WL MVDR weights, filtering and output IN extraction.
//! - [`analysis`]: standard/complementary variance of the output IN and the
//!   overall and per-channel (I/Q) SINR gains.
//! - [`theory`]: closed-form gains under uniform-power, orthogonal interferences.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod beamform;
mod error;
pub mod linalg;
pub mod scenario;
pub mod signal;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Converts a linear power ratio to decibels.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Converts decibels to a linear power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
