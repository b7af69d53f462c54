//! Maximum-directivity beamformer design with real-valued weights.
//!
//! The crate covers three array families: uniform linear arrays, generic open
//! arrays described by sensor positions, and rigid spherical arrays processed
//! in the spherical-harmonics (phase-mode) domain. For each of them it builds
//! the quadratic-form matrices that define directivity and sensitivity,
//! solves for complex and real-valued optimal weights, and evaluates
//! beampatterns and lobe structure.
//!
//! Module map:
//!
//! * [`specfun`]: Legendre polynomials, spherical harmonics, spherical
//!   Bessel/Hankel functions and rigid-sphere mode strength.
//! * [`quad`]: Gauss-Legendre quadrature rules.
//! * [`geometry`]: array models, manifold vectors, sampling layouts, steering.
//! * [`cmatrix`]: directivity (`C`) and sensitivity (`U`) matrices.
//! * [`design`]: the optimizers and sensitivity bounds.
//! * [`analysis`]: beampatterns, directivity, sensitivity and lobe analysis.
//! * [`pwd`]: simulated plane-wave decomposition on a rigid sphere.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cmatrix;
pub mod design;
mod error;
pub mod geometry;
pub mod pwd;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default speed of sound in air, m/s.
pub const SOUND_SPEED: f64 = 343.0;

/// Power ratio to decibels.
pub fn db10(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Decibels to power ratio.
pub fn from_db10(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
