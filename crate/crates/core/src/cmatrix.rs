//! Quadratic-form matrices for directivity (`C`) and sensitivity (`U`).
//!
//! `C` is the cost-weighted average of `v v^H` over the sphere. With the sine
//! cost it is the isotropic-noise correlation matrix, and the ratio
//! `|w^T b|^2 / (w^T C w^*)` is the directivity. Other costs reweight the
//! polar angle measured from the array axis (linear arrays) or from the look
//! direction (phase-mode arrays).
//!
//! Every cost is normalised by `kappa = (1/2) int_0^pi rho(theta) d theta`, so
//! a single omnidirectional channel always yields `[[1]]` and the sine cost
//! reproduces the closed forms exactly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{ArrayGeometry, ArrayModel, Arrival, SphericalAngle};
use crate::quad::GaussLegendre;
use crate::specfun::ModeStrengthSpectrum;
use crate::{Error, Result};

/// Relative entry change tolerated when the quadrature order is doubled.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// Angular weighting `rho(theta)` inside the `C` integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFunction {
    /// `sin theta`: physical directivity.
    Sin,
    /// `theta / pi`: zero at the look direction, largest opposite it.
    Linear,
    /// Constant 1.
    Uniform,
    /// `floor` below `theta0`, 1 above.
    Step { theta0: f64, floor: f64 },
    /// Piecewise-linear through `(theta, value)` samples, held constant
    /// beyond the first and last sample.
    Custom { samples: Vec<(f64, f64)> },
}

impl CostFunction {
    pub const DEFAULT_STEP_THETA0_DEG: f64 = 17.0;
    pub const DEFAULT_STEP_FLOOR: f64 = 1e-3;

    pub fn default_step() -> Self {
        CostFunction::Step {
            theta0: Self::DEFAULT_STEP_THETA0_DEG.to_radians(),
            floor: Self::DEFAULT_STEP_FLOOR,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CostFunction::Sin => "sin",
            CostFunction::Linear => "linear",
            CostFunction::Uniform => "uniform",
            CostFunction::Step { .. } => "step",
            CostFunction::Custom { .. } => "custom",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CostFunction::Step { theta0, floor } => {
                if !(0.0..=PI).contains(theta0) {
                    return Err(Error::Domain(format!("step angle {theta0} outside [0, pi]")));
                }
                if !(*floor > 0.0) || !floor.is_finite() {
                    return Err(Error::Domain(format!("step floor must be positive, got {floor}")));
                }
            }
            CostFunction::Custom { samples } => {
                if samples.is_empty() {
                    return Err(Error::Domain("custom cost needs at least one sample".into()));
                }
                if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::Domain("custom cost angles must be strictly increasing".into()));
                }
                if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite() || *v < 0.0) {
                    return Err(Error::Domain("custom cost samples must be finite and nonnegative".into()));
                }
                if samples.iter().all(|(_, v)| *v == 0.0) {
                    return Err(Error::Domain("custom cost is identically zero".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            CostFunction::Sin => theta.sin().max(0.0),
            CostFunction::Linear => theta / PI,
            CostFunction::Uniform => 1.0,
            CostFunction::Step { theta0, floor } => {
                if theta < *theta0 {
                    *floor
                } else {
                    1.0
                }
            }
            CostFunction::Custom { samples } => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if theta <= first.0 {
                    return first.1;
                }
                if theta >= last.0 {
                    return last.1;
                }
                let i = samples.partition_point(|(t, _)| *t <= theta);
                let (t0, v0) = samples[i - 1];
                let (t1, v1) = samples[i];
                v0 + (v1 - v0) * (theta - t0) / (t1 - t0)
            }
        }
    }

    /// Points in `(0, pi)` where the cost is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            CostFunction::Step { theta0, .. } => vec![*theta0],
            CostFunction::Custom { samples } => samples.iter().map(|(t, _)| *t).collect(),
            _ => Vec::new(),
        }
        .into_iter()
        .filter(|t| *t > 0.0 && *t < PI)
        .collect()
    }

    /// Composite Gauss-Legendre rule on `[0, pi]` split at the breakpoints.
    fn polar_rule(&self, nodes_per_piece: usize) -> GaussLegendre {
        let mut edges = vec![0.0];
        edges.extend(self.breakpoints());
        edges.push(PI);
        let pieces: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
        GaussLegendre::composite(&pieces, nodes_per_piece)
    }
}

/// How a [`CMatrix`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exactness {
    ClosedForm,
    Quadrature { order: usize },
    /// Entries provided by the caller.
    Supplied,
}

/// Hermitian directivity-denominator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    entries: DMatrix<Complex64>,
    cost: CostFunction,
    exactness: Exactness,
}

impl CMatrix {
    /// Wrap caller-provided entries, which must be square and Hermitian to
    /// `1e-12` relative to the largest entry.
    pub fn from_entries(entries: DMatrix<Complex64>, cost: CostFunction) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let defect = (&entries - entries.adjoint()).camax();
        if defect > 1e-12 * entries.camax() {
            return Err(Error::Domain(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self::from_parts(entries, cost, Exactness::Supplied))
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `Re{C}`.
    pub fn real_part(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).camax()
    }

    /// Same matrix multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self.entries.map(|z| z * s),
            ..self.clone()
        }
    }

    /// `w^T C w^*`.
    pub fn quadratic_form(&self, w: &DVector<Complex64>) -> Result<f64> {
        if w.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: w.len(),
            });
        }
        let conj = w.map(|z| z.conj());
        Ok((w.transpose() * &self.entries * conj)[(0, 0)].re)
    }

    fn from_parts(entries: DMatrix<Complex64>, cost: CostFunction, exactness: Exactness) -> Self {
        // enforce exact Hermitian symmetry and a real diagonal
        let sym = (&entries + entries.adjoint()).map(|z| z * 0.5);
        Self {
            entries: sym,
            cost,
            exactness,
        }
    }
}

/// Closed-form `C` of a uniform linear array with sine cost:
/// `[C]_nm = sinc(2 d (n - m) / lambda)`.
pub fn c_linear(m: usize, d: f64, lambda: f64) -> Result<CMatrix> {
    if m == 0 {
        return Err(Error::InvalidModel("linear array needs at least one sensor".into()));
    }
    if !(d > 0.0) || !(lambda > 0.0) || !d.is_finite() || !lambda.is_finite() {
        return Err(Error::Domain(format!("spacing {d} and wavelength {lambda} must be positive")));
    }
    let entries = DMatrix::from_fn(m, m, |i, j| {
        let x = 2.0 * d * (i as f64 - j as f64) / lambda;
        Complex64::new(sinc(x), 0.0)
    });
    Ok(CMatrix::from_parts(entries, CostFunction::Sin, Exactness::ClosedForm))
}

/// Normalised `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `C` of a rigid-sphere phase-mode array of order `n` at `kr`. The sine
/// cost uses the diagonal closed form; other costs integrate over the angle
/// from the look direction.
pub fn c_spherical(n: usize, kr: f64, cost: &CostFunction) -> Result<CMatrix> {
    let modes = ModeStrengthSpectrum::new(n, kr)?;
    c_spherical_modes(&modes, cost)
}

fn c_spherical_modes(modes: &ModeStrengthSpectrum, cost: &CostFunction) -> Result<CMatrix> {
    cost.validate()?;
    match cost {
        CostFunction::Sin => {
            let diag = DVector::from_iterator(
                modes.values.len(),
                modes
                    .values
                    .iter()
                    .enumerate()
                    .map(|(k, b)| Complex64::new((2 * k + 1) as f64 * b.norm_sqr() / (16.0 * PI * PI), 0.0)),
            );
            Ok(CMatrix::from_parts(
                DMatrix::from_diagonal(&diag),
                CostFunction::Sin,
                Exactness::ClosedForm,
            ))
        }
        _ => c_spherical_quadrature(modes, cost, default_spherical_nodes(modes.order_max)),
    }
}

fn default_spherical_nodes(order: usize) -> usize {
    8 * (order + 1)
}

/// Axisymmetric quadrature of `(1/2) int v v^H rho d Theta / kappa`, checked
/// by doubling the node count.
pub fn c_spherical_quadrature(modes: &ModeStrengthSpectrum, cost: &CostFunction, nodes: usize) -> Result<CMatrix> {
    cost.validate()?;
    let coarse = axisymmetric_integral(modes, cost, nodes);
    let fine = axisymmetric_integral(modes, cost, 2 * nodes);
    check_convergence(&coarse, &fine, nodes)?;
    Ok(CMatrix::from_parts(
        fine,
        cost.clone(),
        Exactness::Quadrature { order: 2 * nodes },
    ))
}

fn axisymmetric_integral(modes: &ModeStrengthSpectrum, cost: &CostFunction, nodes: usize) -> DMatrix<Complex64> {
    let k = modes.values.len();
    let rule = cost.polar_rule(nodes);
    let mut acc = DMatrix::<Complex64>::zeros(k, k);
    let mut kappa = 0.0;
    let mut v = DVector::<Complex64>::zeros(k);
    for (&theta, &w) in rule.nodes.iter().zip(&rule.weights) {
        let rho = cost.eval(theta);
        kappa += 0.5 * w * rho;
        let x = theta.cos();
        let (mut p_prev, mut p) = (0.0, 1.0);
        for (n, b) in modes.values.iter().enumerate() {
            if n > 0 {
                let nf = (n - 1) as f64;
                let next = if n == 1 {
                    x
                } else {
                    ((2.0 * nf + 1.0) * x * p - nf * p_prev) / (nf + 1.0)
                };
                p_prev = p;
                p = next;
            }
            v[n] = b * ((2 * n + 1) as f64 / (4.0 * PI) * p);
        }
        acc.ger(Complex64::new(0.5 * w * rho, 0.0), &v, &v.map(|z| z.conj()), Complex64::new(1.0, 0.0));
    }
    acc / Complex64::new(kappa, 0.0)
}

/// `C` for any model by quadrature over the full sphere: Gauss-Legendre in
/// the polar angle times the trapezoid rule in azimuth, measure
/// `rho(theta) d theta d phi`. `polar_nodes = None` picks an order from the
/// array aperture. Phase-mode models use the axisymmetric integral.
pub fn c_numeric(model: &ArrayModel, cost: &CostFunction, polar_nodes: Option<usize>) -> Result<CMatrix> {
    cost.validate()?;
    if let ArrayGeometry::SphericalPhaseMode { order, .. } = model.geometry() {
        let modes = model.mode_strengths().expect("phase-mode model carries mode strengths");
        let nodes = polar_nodes.unwrap_or_else(|| default_spherical_nodes(*order));
        return c_spherical_quadrature(modes, cost, nodes);
    }
    let positions = model.positions().expect("open geometry has positions");
    let k = model.wavenumber();
    let extent = positions
        .iter()
        .flat_map(|a| positions.iter().map(move |b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()))
        .fold(0.0, f64::max);
    let transverse = positions.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    let nodes = polar_nodes.unwrap_or(((k * extent).ceil() as usize + 16).max(16));
    let azimuth = 2 * (2.0 * k * transverse).ceil() as usize + 16;
    let coarse = open_integral(model, cost, nodes, azimuth)?;
    let fine = open_integral(model, cost, 2 * nodes, 2 * azimuth)?;
    check_convergence(&coarse, &fine, nodes)?;
    Ok(CMatrix::from_parts(
        fine,
        cost.clone(),
        Exactness::Quadrature { order: 2 * nodes },
    ))
}

fn open_integral(model: &ArrayModel, cost: &CostFunction, nodes: usize, azimuth: usize) -> Result<DMatrix<Complex64>> {
    let m = model.manifold_len();
    let rule = cost.polar_rule(nodes);
    let mut acc = DMatrix::<Complex64>::zeros(m, m);
    let mut norm = 0.0;
    let dphi = 2.0 * PI / azimuth as f64;
    for (&theta, &w) in rule.nodes.iter().zip(&rule.weights) {
        let rho = cost.eval(theta);
        for j in 0..azimuth {
            let weight = w * rho * dphi;
            norm += weight;
            let v = model.manifold(Arrival::Direction(SphericalAngle::new(theta, j as f64 * dphi)?))?;
            acc.ger(Complex64::new(weight, 0.0), &v, &v.map(|z| z.conj()), Complex64::new(1.0, 0.0));
        }
    }
    Ok(acc / Complex64::new(norm, 0.0))
}

fn check_convergence(coarse: &DMatrix<Complex64>, fine: &DMatrix<Complex64>, order: usize) -> Result<()> {
    let scale = fine.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let change = (fine - coarse).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
    if change > QUADRATURE_TOLERANCE {
        return Err(Error::Quadrature {
            order,
            change,
            tolerance: QUADRATURE_TOLERANCE,
        });
    }
    Ok(())
}

/// Diagonal phase-mode sensitivity matrix `diag(1, 3, ..., 2N+1) / M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UMatrix {
    diagonal: Vec<f64>,
    microphones: usize,
}

impl UMatrix {
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn microphones(&self) -> usize {
        self.microphones
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.diagonal))
    }

    /// `d^H U d`.
    pub fn quadratic_form(&self, d: &[Complex64]) -> Result<f64> {
        if d.len() != self.diagonal.len() {
            return Err(Error::Dimension {
                expected: self.diagonal.len(),
                got: d.len(),
            });
        }
        Ok(d.iter().zip(&self.diagonal).map(|(x, u)| u * x.norm_sqr()).sum())
    }
}

pub fn u_matrix(n: usize, microphones: usize) -> Result<UMatrix> {
    if microphones == 0 {
        return Err(Error::Domain("microphone count must be positive".into()));
    }
    Ok(UMatrix {
        diagonal: (0..=n).map(|k| (2 * k + 1) as f64 / microphones as f64).collect(),
        microphones,
    })
}
