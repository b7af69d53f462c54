//! Array models and manifold vectors.
//!
//! Three families are supported:
//!
//! * uniform linear arrays along the z axis, origin at the first sensor,
//!   arrival angle measured from endfire;
//! * generic open arrays given by sensor positions, free-field phase delays
//!   only;
//! * rigid spherical arrays processed in the phase-mode domain, where the
//!   manifold is indexed by spherical-harmonic order and depends only on the
//!   angle from the look axis.

mod layout;
mod steer;

pub use layout::SamplingLayout;
pub use steer::{steer, steer_allow_undersampled, SteeredSpatialWeights};

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::ModeStrengthSpectrum;
use crate::{Error, Result, SOUND_SPEED};

/// A direction on the sphere: polar angle `theta` in `[0, pi]`, azimuth
/// `phi` in `[0, 2 pi)`, both in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalAngle {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalAngle {
    /// Validates `theta` and wraps `phi` into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::Domain(format!("polar angle {theta} outside [0, pi]")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("azimuth {phi} is not finite")));
        }
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi,
        })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// The z axis.
    pub const fn zenith() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Direction of a (not necessarily unit) Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(r > 0.0) {
            return Err(Error::Domain("zero vector has no direction".into()));
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        Self::new(theta, v[1].atan2(v[0]))
    }

    pub fn antipode(&self) -> Self {
        Self {
            theta: PI - self.theta,
            phi: (self.phi + PI).rem_euclid(2.0 * PI),
        }
    }

    pub fn to_degrees(&self) -> (f64, f64) {
        (self.theta.to_degrees(), self.phi.to_degrees())
    }
}

/// Angle between two directions, in `[0, pi]`.
pub fn angle_between(a: SphericalAngle, b: SphericalAngle) -> f64 {
    let c = a.theta.cos() * b.theta.cos() + a.theta.sin() * b.theta.sin() * (a.phi - b.phi).cos();
    // dot products of unit vectors can overshoot 1 by a few ulp
    c.clamp(-1.0, 1.0).acos()
}

/// Sensor arrangement of an [`ArrayModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrayGeometry {
    Linear { sensors: usize, spacing: f64 },
    GenericOpen { positions: Vec<[f64; 3]> },
    SphericalPhaseMode { order: usize, radius: f64 },
}

/// Whether weights multiply sensor signals or spherical-harmonic orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Spatial,
    PhaseMode,
}

/// Parameterisation of a plane-wave arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arrival {
    /// Polar angle from the array axis: endfire angle for linear arrays, the
    /// angle from the look axis for phase-mode arrays.
    Polar(f64),
    /// Direction the wave arrives from.
    Direction(SphericalAngle),
    /// Propagation wavevector `k_0` in rad/m.
    Wavevector([f64; 3]),
}

/// Geometry plus acoustic parameters; produces manifold vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayModel {
    geometry: ArrayGeometry,
    sound_speed: f64,
    frequency: f64,
    modes: Option<ModeStrengthSpectrum>,
}

impl ArrayModel {
    pub fn new(geometry: ArrayGeometry, frequency: f64, sound_speed: f64) -> Result<Self> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::InvalidModel(format!("frequency must be positive, got {frequency}")));
        }
        if !(sound_speed > 0.0) || !sound_speed.is_finite() {
            return Err(Error::InvalidModel(format!("sound speed must be positive, got {sound_speed}")));
        }
        let k = 2.0 * PI * frequency / sound_speed;
        let modes = match &geometry {
            ArrayGeometry::Linear { sensors, spacing } => {
                if *sensors == 0 {
                    return Err(Error::InvalidModel("linear array needs at least one sensor".into()));
                }
                if !(*spacing > 0.0) || !spacing.is_finite() {
                    return Err(Error::InvalidModel(format!("spacing must be positive, got {spacing}")));
                }
                None
            }
            ArrayGeometry::GenericOpen { positions } => {
                if positions.is_empty() {
                    return Err(Error::InvalidModel("open array needs at least one position".into()));
                }
                if positions.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidModel("sensor positions must be finite".into()));
                }
                None
            }
            ArrayGeometry::SphericalPhaseMode { order, radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidModel(format!("radius must be positive, got {radius}")));
                }
                Some(ModeStrengthSpectrum::new(*order, k * radius)?)
            }
        };
        Ok(Self {
            geometry,
            sound_speed,
            frequency,
            modes,
        })
    }

    /// Uniform linear array with `sensors` elements spaced `spacing` metres.
    pub fn linear(sensors: usize, spacing: f64, frequency: f64) -> Result<Self> {
        Self::new(ArrayGeometry::Linear { sensors, spacing }, frequency, SOUND_SPEED)
    }

    pub fn generic_open(positions: Vec<[f64; 3]>, frequency: f64) -> Result<Self> {
        Self::new(ArrayGeometry::GenericOpen { positions }, frequency, SOUND_SPEED)
    }

    pub fn spherical(order: usize, radius: f64, frequency: f64) -> Result<Self> {
        Self::new(ArrayGeometry::SphericalPhaseMode { order, radius }, frequency, SOUND_SPEED)
    }

    /// Rigid sphere of unit radius at the frequency giving the requested `kr`.
    pub fn spherical_at_kr(order: usize, kr: f64) -> Result<Self> {
        if !(kr > 0.0) || !kr.is_finite() {
            return Err(Error::InvalidModel(format!("kr must be positive, got {kr}")));
        }
        let frequency = kr * SOUND_SPEED / (2.0 * PI);
        let mut model = Self::new(ArrayGeometry::SphericalPhaseMode { order, radius: 1.0 }, frequency, SOUND_SPEED)?;
        // keep kr bit-exact rather than round-tripping through the frequency
        model.modes = Some(ModeStrengthSpectrum::new(order, kr)?);
        Ok(model)
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.frequency / self.sound_speed
    }

    pub fn wavelength(&self) -> f64 {
        self.sound_speed / self.frequency
    }

    /// `kr` for spherical models.
    pub fn kr(&self) -> Option<f64> {
        self.modes.as_ref().map(|m| m.kr)
    }

    pub fn mode_strengths(&self) -> Option<&ModeStrengthSpectrum> {
        self.modes.as_ref()
    }

    pub fn domain(&self) -> Domain {
        match self.geometry {
            ArrayGeometry::SphericalPhaseMode { .. } => Domain::PhaseMode,
            _ => Domain::Spatial,
        }
    }

    /// Number of channels: sensors, or `N + 1` orders.
    pub fn manifold_len(&self) -> usize {
        match &self.geometry {
            ArrayGeometry::Linear { sensors, .. } => *sensors,
            ArrayGeometry::GenericOpen { positions } => positions.len(),
            ArrayGeometry::SphericalPhaseMode { order, .. } => order + 1,
        }
    }

    /// Sensor positions in metres; `None` for phase-mode models.
    pub fn positions(&self) -> Option<Vec<[f64; 3]>> {
        match &self.geometry {
            ArrayGeometry::Linear { sensors, spacing } => {
                Some((0..*sensors).map(|q| [0.0, 0.0, q as f64 * spacing]).collect())
            }
            ArrayGeometry::GenericOpen { positions } => Some(positions.clone()),
            ArrayGeometry::SphericalPhaseMode { .. } => None,
        }
    }

    /// Per-channel response to a unit plane wave.
    pub fn manifold(&self, arrival: Arrival) -> Result<DVector<Complex64>> {
        match (&self.geometry, arrival) {
            (ArrayGeometry::Linear { sensors, spacing }, Arrival::Polar(theta)) => {
                check_polar(theta)?;
                let psi = self.wavenumber() * spacing * theta.cos();
                Ok(DVector::from_fn(*sensors, |q, _| Complex64::from_polar(1.0, psi * q as f64)))
            }
            (ArrayGeometry::Linear { .. }, Arrival::Direction(dir)) => {
                self.manifold(Arrival::Polar(dir.theta))
            }
            (ArrayGeometry::GenericOpen { .. }, Arrival::Polar(theta)) => {
                self.manifold(Arrival::Direction(SphericalAngle::new(theta, 0.0)?))
            }
            (ArrayGeometry::GenericOpen { .. }, Arrival::Direction(dir)) => {
                let u = dir.unit_vector();
                let k = self.wavenumber();
                // a wave arriving from `dir` propagates along -u
                self.manifold(Arrival::Wavevector([-k * u[0], -k * u[1], -k * u[2]]))
            }
            (ArrayGeometry::Linear { .. } | ArrayGeometry::GenericOpen { .. }, Arrival::Wavevector(k0)) => {
                let positions = self.positions().expect("open geometry has positions");
                Ok(DVector::from_iterator(
                    positions.len(),
                    positions.iter().map(|r| {
                        let phase = k0[0] * r[0] + k0[1] * r[1] + k0[2] * r[2];
                        Complex64::from_polar(1.0, -phase)
                    }),
                ))
            }
            (ArrayGeometry::SphericalPhaseMode { .. }, Arrival::Polar(theta)) => {
                check_polar(theta)?;
                Ok(self.phase_mode_manifold(theta.cos()))
            }
            (ArrayGeometry::SphericalPhaseMode { .. }, Arrival::Direction(dir)) => {
                Ok(self.phase_mode_manifold(dir.theta.cos()))
            }
            (ArrayGeometry::SphericalPhaseMode { .. }, Arrival::Wavevector(_)) => Err(Error::InvalidModel(
                "phase-mode manifolds are parameterised by the angle from the look axis".into(),
            )),
        }
    }

    /// Manifold in the look direction. Phase-mode designs are look-independent
    /// and use `Theta = 0`.
    pub fn look_manifold(&self, look: SphericalAngle) -> Result<DVector<Complex64>> {
        match self.geometry {
            ArrayGeometry::SphericalPhaseMode { .. } => self.manifold(Arrival::Polar(0.0)),
            _ => self.manifold(Arrival::Direction(look)),
        }
    }

    // v_n = b_n (2n+1)/(4 pi) P_n(cos Theta)
    fn phase_mode_manifold(&self, cos_theta: f64) -> DVector<Complex64> {
        let modes = self.modes.as_ref().expect("phase-mode model carries mode strengths");
        let x = cos_theta.clamp(-1.0, 1.0);
        let mut v = DVector::zeros(modes.values.len());
        let (mut p_prev, mut p) = (0.0, 1.0);
        for (n, b) in modes.values.iter().enumerate() {
            if n > 0 {
                let nf = (n - 1) as f64;
                let next = if n == 1 { x } else { ((2.0 * nf + 1.0) * x * p - nf * p_prev) / (nf + 1.0) };
                p_prev = p;
                p = next;
            }
            v[n] = b * ((2 * n + 1) as f64 / (4.0 * PI) * p);
        }
        v
    }
}

fn check_polar(theta: f64) -> Result<()> {
    if !theta.is_finite() || !(-1e-12..=PI + 1e-12).contains(&theta) {
        return Err(Error::Domain(format!("arrival angle {theta} outside [0, pi]")));
    }
    Ok(())
}

/// Whether a weight vector carries real or complex values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueClass {
    Real,
    Complex,
}

/// Design weights tagged with their domain and look direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    values: Vec<Complex64>,
    domain: Domain,
    class: ValueClass,
    look: SphericalAngle,
}

impl WeightVector {
    pub fn from_real(values: &[f64], domain: Domain, look: SphericalAngle) -> Self {
        Self {
            values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            domain,
            class: ValueClass::Real,
            look,
        }
    }

    pub fn from_complex(values: Vec<Complex64>, domain: Domain, look: SphericalAngle) -> Self {
        Self {
            values,
            domain,
            class: ValueClass::Complex,
            look,
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    /// Real parts, if the class is real.
    pub fn real_values(&self) -> Option<Vec<f64>> {
        (self.class == ValueClass::Real).then(|| self.values.iter().map(|v| v.re).collect())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn class(&self) -> ValueClass {
        self.class
    }

    pub fn look(&self) -> SphericalAngle {
        self.look
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `w^T v`, no conjugation.
    pub fn response(&self, manifold: &DVector<Complex64>) -> Result<Complex64> {
        if manifold.len() != self.values.len() {
            return Err(Error::Dimension {
                expected: self.values.len(),
                got: manifold.len(),
            });
        }
        Ok(self.values.iter().zip(manifold.iter()).map(|(w, v)| w * v).sum())
    }

    /// Same class and domain, values multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }
}
