//! Microphone sampling layouts on the sphere.
//!
//! A layout is a list of directions with per-point sampling coefficients
//! `alpha_i`. On disk it is JSON:
//!
//! ```text
//! {"M": 32, "points": [[theta, phi], ...], "alpha": [...]}
//! ```
//!
//! with angles in radians.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SphericalAngle;
use crate::quad::GaussLegendre;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingLayout {
    points: Vec<SphericalAngle>,
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutFile {
    #[serde(rename = "M")]
    m: usize,
    points: Vec<[f64; 2]>,
    alpha: Vec<f64>,
}

impl SamplingLayout {
    pub fn new(points: Vec<SphericalAngle>, alpha: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidLayout("layout has no points".into()));
        }
        if points.len() != alpha.len() {
            return Err(Error::InvalidLayout(format!(
                "{} points but {} sampling coefficients",
                points.len(),
                alpha.len()
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidLayout(format!("sampling coefficient {a} is not positive")));
        }
        Ok(Self { points, alpha })
    }

    /// Spherical Fibonacci points with equal coefficients `4 pi / M`.
    pub fn fibonacci(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidLayout("layout has no points".into()));
        }
        let golden = PI * (1.0 + 5f64.sqrt());
        let points = (0..m)
            .map(|i| {
                let t = (i as f64 + 0.5) / m as f64;
                SphericalAngle::new((1.0 - 2.0 * t).clamp(-1.0, 1.0).acos(), golden * (i as f64 + 0.5))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, vec![4.0 * PI / m as f64; m])
    }

    /// Gauss-Legendre nodes in `cos theta` times equiangular azimuths. Exact
    /// for band-limited integrands of degree below `2 n_theta` in `cos theta`
    /// and azimuthal frequency below `n_phi`.
    pub fn gauss_product(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidLayout("empty product grid".into()));
        }
        let rule = GaussLegendre::new(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut alpha = Vec::with_capacity(n_theta * n_phi);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights).rev() {
            for j in 0..n_phi {
                points.push(SphericalAngle::new(x.acos(), 2.0 * PI * j as f64 / n_phi as f64)?);
                alpha.push(w * 2.0 * PI / n_phi as f64);
            }
        }
        Self::new(points, alpha)
    }

    pub fn points(&self) -> &[SphericalAngle] {
        &self.points
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(N + 1)^2` points are needed for order-`N` operations.
    pub fn min_points(order: usize) -> usize {
        (order + 1) * (order + 1)
    }

    pub fn supports_order(&self, order: usize) -> bool {
        self.len() >= Self::min_points(order)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: LayoutFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidLayout(format!("malformed layout JSON: {e}")))?;
        if file.m != file.points.len() {
            return Err(Error::InvalidLayout(format!(
                "M = {} but {} points listed",
                file.m,
                file.points.len()
            )));
        }
        let points = file
            .points
            .iter()
            .map(|[t, p]| {
                if !(0.0..=PI).contains(t) || !(0.0..2.0 * PI).contains(p) {
                    return Err(Error::InvalidLayout(format!("point ({t}, {p}) outside [0,pi] x [0,2pi)")));
                }
                SphericalAngle::new(*t, *p)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, file.alpha)
    }

    pub fn to_json_string(&self) -> String {
        let file = LayoutFile {
            m: self.len(),
            points: self.points.iter().map(|p| [p.theta, p.phi]).collect(),
            alpha: self.alpha.clone(),
        };
        serde_json::to_string_pretty(&file).expect("layout serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidLayout(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// The bundled 32-point nearly-uniform layout.
    pub fn bundled_32() -> Self {
        Self::from_json_str(include_str!("../../data/fibonacci32.json")).expect("bundled layout is valid")
    }
}
