//! Steering phase-mode weights to microphone weights.
//!
//! With `w_nm^* = d_n Y_n^m(look)` the weighting function is axisymmetric
//! about the look direction and reduces, by the addition theorem, to
//! `g(Theta) = sum_n d_n (2n+1)/(4 pi) P_n(cos Theta)`. The stored weights are
//! the factors `g(Theta_i)` that multiply `alpha_i p(Omega_i)` in the array
//! output, so steering is a substitution of the look direction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{angle_between, Domain, SamplingLayout, SphericalAngle, ValueClass, WeightVector};
use crate::specfun::legendre_all;
use crate::{Error, Result};

/// Per-microphone weights for a particular look direction and layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeredSpatialWeights {
    pub look: SphericalAngle,
    pub points: Vec<SphericalAngle>,
    pub alpha: Vec<f64>,
    pub weights: Vec<Complex64>,
    pub class: ValueClass,
    /// Set when the layout has fewer than `(N + 1)^2` points.
    pub undersampled: bool,
}

impl SteeredSpatialWeights {
    /// Array output `sum_i alpha_i g_i p_i` for microphone pressures `p`.
    pub fn output(&self, pressures: &[Complex64]) -> Result<Complex64> {
        if pressures.len() != self.weights.len() {
            return Err(Error::Dimension {
                expected: self.weights.len(),
                got: pressures.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.alpha)
            .zip(pressures)
            .map(|((g, a), p)| g * p * *a)
            .sum())
    }

    /// `sum_i |alpha_i g_i|^2`.
    pub fn sensitivity(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.alpha)
            .map(|(g, a)| (g * *a).norm_sqr())
            .sum()
    }
}

/// Steer phase-mode weights `d` to `look` over `layout`. Fails when the layout
/// has fewer than `(N + 1)^2` points.
pub fn steer(d: &WeightVector, look: SphericalAngle, layout: &SamplingLayout) -> Result<SteeredSpatialWeights> {
    let order = phase_mode_order(d)?;
    let needed = SamplingLayout::min_points(order);
    if layout.len() < needed {
        return Err(Error::LayoutTooSmall {
            points: layout.len(),
            order,
            needed,
        });
    }
    steer_allow_undersampled(d, look, layout)
}

/// As [`steer`], flagging rather than rejecting undersized layouts.
pub fn steer_allow_undersampled(
    d: &WeightVector,
    look: SphericalAngle,
    layout: &SamplingLayout,
) -> Result<SteeredSpatialWeights> {
    let order = phase_mode_order(d)?;
    let coeffs: Vec<f64> = (0..=order).map(|n| (2 * n + 1) as f64 / (4.0 * PI)).collect();
    let weights = layout
        .points()
        .iter()
        .map(|p| {
            let legendre = legendre_all(order, angle_between(*p, look).cos())?;
            Ok(match d.class() {
                ValueClass::Real => {
                    let re: f64 = d.values().iter().zip(&coeffs).zip(&legendre).map(|((dn, c), pn)| dn.re * c * pn).sum();
                    Complex64::new(re, 0.0)
                }
                ValueClass::Complex => d
                    .values()
                    .iter()
                    .zip(&coeffs)
                    .zip(&legendre)
                    .map(|((dn, c), pn)| dn * (c * pn))
                    .sum(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SteeredSpatialWeights {
        look,
        points: layout.points().to_vec(),
        alpha: layout.alpha().to_vec(),
        weights,
        class: d.class(),
        undersampled: layout.len() < SamplingLayout::min_points(order),
    })
}

fn phase_mode_order(d: &WeightVector) -> Result<usize> {
    if d.domain() != Domain::PhaseMode {
        return Err(Error::InvalidModel("only phase-mode weights can be steered".into()));
    }
    if d.is_empty() {
        return Err(Error::InvalidModel("empty weight vector".into()));
    }
    Ok(d.len() - 1)
}
