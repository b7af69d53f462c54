//! Optimal beamformer design.
//!
//! All designers maximise or minimise a quadratic form under the
//! distortionless constraint `|w^T b| = 1`:
//!
//! * complex maximum directivity, `w = (C^-1 b / b^H C^-1 b)^*`;
//! * real maximum directivity, solving with `Re{C}` after rotating `b` by the
//!   phase `phi = arg(b^T Re{C}^-1 b) / 2`;
//! * real maximum directivity with a sensitivity cap, by diagonal loading
//!   `Re{C} + beta S` and a bisection on `beta`;
//! * complex and real minimum sensitivity, whose sensitivities are the lower
//!   bounds `T_min^c <= T_min^r`.
//!
//! Real weights are computed in real arithmetic, so their imaginary parts are
//! exactly zero. Linear systems are solved by Cholesky factorisation of the
//! Jacobi-scaled matrix; its condition number is reported and must stay
//! below [`MAX_CONDITION`].

use nalgebra::{Cholesky, ComplexField, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{c_linear, c_numeric, c_spherical, u_matrix, CMatrix, CostFunction};
use crate::geometry::{ArrayGeometry, ArrayModel, Domain, SphericalAngle, WeightVector};
use crate::{db10, Error, Result};

/// Largest accepted condition number of a Jacobi-scaled system matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative tolerance on the capped sensitivity.
pub const BISECTION_TOLERANCE: f64 = 1e-6;
pub const BISECTION_MAX_ITERATIONS: usize = 200;
const MAX_DOUBLINGS: usize = 1000;

/// Everything a designer needs: the design matrix `C`, the sine-cost matrix
/// used to report directivity, the sensitivity metric `S` and the look
/// manifold `b`.
#[derive(Debug, Clone)]
pub struct DesignProblem {
    c: CMatrix,
    c_directivity: CMatrix,
    metric: DMatrix<f64>,
    b: DVector<Complex64>,
    domain: Domain,
    look: SphericalAngle,
}

impl DesignProblem {
    pub fn new(
        c: CMatrix,
        c_directivity: CMatrix,
        metric: DMatrix<f64>,
        b: DVector<Complex64>,
        domain: Domain,
        look: SphericalAngle,
    ) -> Result<Self> {
        let m = b.len();
        if m == 0 {
            return Err(Error::Domain("empty look manifold".into()));
        }
        for got in [c.dim(), c_directivity.dim(), metric.nrows(), metric.ncols()] {
            if got != m {
                return Err(Error::Dimension { expected: m, got });
            }
        }
        if (&metric - metric.transpose()).amax() > 1e-12 * metric.amax() || metric.diagonal().iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Domain("sensitivity metric must be symmetric with a positive diagonal".into()));
        }
        Ok(Self {
            c,
            c_directivity,
            metric,
            b,
            domain,
            look,
        })
    }

    /// Problem for `model` steered to `look` with design cost `cost`. The
    /// metric is the identity for spatial arrays and `U` with `(N + 1)^2`
    /// microphones for phase-mode arrays.
    pub fn for_model(model: &ArrayModel, look: SphericalAngle, cost: &CostFunction) -> Result<Self> {
        let c_directivity = match model.geometry() {
            ArrayGeometry::Linear { sensors, spacing } => c_linear(*sensors, *spacing, model.wavelength())?,
            ArrayGeometry::GenericOpen { .. } => c_numeric(model, &CostFunction::Sin, None)?,
            ArrayGeometry::SphericalPhaseMode { order, .. } => {
                c_spherical(*order, model.kr().expect("phase-mode model has kr"), &CostFunction::Sin)?
            }
        };
        let c = if *cost == CostFunction::Sin {
            c_directivity.clone()
        } else {
            c_numeric(model, cost, None)?
        };
        let m = model.manifold_len();
        let metric = match model.geometry() {
            ArrayGeometry::SphericalPhaseMode { order, .. } => u_matrix(*order, (order + 1) * (order + 1))?.to_dmatrix(),
            _ => DMatrix::identity(m, m),
        };
        Self::new(c, c_directivity, metric, model.look_manifold(look)?, model.domain(), look)
    }

    /// Replace the phase-mode metric by `U` for `microphones` sensors.
    pub fn with_microphones(mut self, microphones: usize) -> Result<Self> {
        if self.domain != Domain::PhaseMode {
            return Err(Error::InvalidModel("microphone count only applies to phase-mode designs".into()));
        }
        self.metric = u_matrix(self.b.len() - 1, microphones)?.to_dmatrix();
        Ok(self)
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn c_directivity(&self) -> &CMatrix {
        &self.c_directivity
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn manifold(&self) -> &DVector<Complex64> {
        &self.b
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn look(&self) -> SphericalAngle {
        self.look
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    MaxDirectivityComplex,
    MaxDirectivityReal,
    BoundedSensitivityReal,
    MinSensitivityComplex,
    MinSensitivityReal,
}

/// Weights plus diagnostics. Directivity always uses the sine-cost matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub kind: DesignKind,
    pub cost: String,
    pub weights: WeightVector,
    /// Rotation applied to `b` before taking the real part (real designs).
    pub phase_phi: Option<f64>,
    /// Diagonal loading (0 when the cap is inactive).
    pub beta: f64,
    pub directivity: f64,
    pub directivity_index_db: f64,
    pub sensitivity: f64,
    pub sensitivity_db: f64,
    pub bound_complex: f64,
    pub bound_real: f64,
    /// Condition number of the Jacobi-scaled system matrix.
    pub condition_number: Option<f64>,
    pub lagrange_lambda: Option<f64>,
}

/// Lower bounds on sensitivity for a manifold and metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityBounds {
    /// `T_min^c = 1 / (b^H S^-1 b)`.
    pub complex: f64,
    /// `T_min^r = 1 / gamma_max`.
    pub real: f64,
    pub gamma_max: f64,
    /// Nonzero eigenvalue of the whitened `b b^H`.
    pub mu: f64,
    /// Eigenvalues of the whitened `Re{b b^H}`, descending.
    pub gammas: Vec<f64>,
}

/// Sensitivity bounds with the metric whitened away: `b' = L^-1 b` for
/// `S = L L^T`.
pub fn sensitivity_bounds(b: &DVector<Complex64>, metric: &DMatrix<f64>) -> Result<SensitivityBounds> {
    if metric.nrows() != b.len() || metric.ncols() != b.len() {
        return Err(Error::Dimension {
            expected: b.len(),
            got: metric.nrows(),
        });
    }
    let chol = Cholesky::new(metric.clone())
        .ok_or_else(|| Error::Domain("sensitivity metric is not positive definite".into()))?;
    let l = chol.l();
    let re = l
        .solve_lower_triangular(&b.map(|z| z.re))
        .ok_or_else(|| Error::Numeric("singular metric factor".into()))?;
    let im = l
        .solve_lower_triangular(&b.map(|z| z.im))
        .ok_or_else(|| Error::Numeric("singular metric factor".into()))?;
    let mu = re.norm_squared() + im.norm_squared();
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain("look manifold is zero".into()));
    }
    let gram = &re * re.transpose() + &im * im.transpose();
    let mut gammas: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
    gammas.sort_by(|a, b| b.total_cmp(a));
    let gamma_max = gammas[0];
    if gamma_max < 1e-14 {
        return Err(Error::DegenerateLook { value: gamma_max });
    }
    Ok(SensitivityBounds {
        complex: 1.0 / mu,
        real: 1.0 / gamma_max,
        gamma_max,
        mu,
        gammas,
    })
}

/// Complex maximum-directivity weights `(C^-1 b / b^H C^-1 b)^*`.
pub fn max_directivity_complex(p: &DesignProblem) -> Result<DesignResult> {
    let solver = HpdSolver::new(p.c.entries())?;
    let x = solver.solve(&p.b);
    let den = p.b.dotc(&x).re;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateLook { value: den });
    }
    let w = x.map(|z| (z / den).conj());
    finish(
        p,
        DesignKind::MaxDirectivityComplex,
        p.c.cost().name(),
        WeightVector::from_complex(w.iter().copied().collect(), p.domain, p.look),
        None,
        0.0,
        Some(solver.condition),
        Some(-1.0 / den),
    )
}

/// Real maximum-directivity weights.
pub fn max_directivity_real(p: &DesignProblem) -> Result<DesignResult> {
    let solver = HpdSolver::new(&p.c.real_part())?;
    let sol = real_solution(&solver, &p.b)?;
    finish(
        p,
        DesignKind::MaxDirectivityReal,
        p.c.cost().name(),
        WeightVector::from_real(sol.w.as_slice(), p.domain, p.look),
        Some(sol.phi),
        0.0,
        Some(solver.condition),
        Some(-1.0 / sol.den),
    )
}

/// Real maximum-directivity weights with `w^T S w <= t0`. An inactive cap
/// returns the unconstrained design with `beta = 0`.
pub fn bounded_sensitivity_real(p: &DesignProblem, t0: f64) -> Result<DesignResult> {
    if !(t0 > 0.0) {
        return Err(Error::Domain(format!("sensitivity cap must be positive, got {t0}")));
    }
    let bounds = sensitivity_bounds(&p.b, &p.metric)?;
    if t0 < bounds.real * (1.0 - 1e-12) {
        return Err(Error::Infeasible {
            cap: t0,
            bound: bounds.real,
        });
    }
    let c_re = p.c.real_part();
    let unloaded = match max_directivity_real(p) {
        Ok(r) => Some(r),
        Err(Error::IllConditioned { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some(r) = unloaded {
        if r.sensitivity <= t0 {
            return Ok(DesignResult {
                kind: DesignKind::BoundedSensitivityReal,
                ..r
            });
        }
    }

    let evaluate = |beta: f64| -> Result<(RealSolution, f64, f64)> {
        let solver = HpdSolver::new(&(&c_re + &p.metric * beta))?;
        let sol = real_solution(&solver, &p.b)?;
        let t = sol.w.dot(&(&p.metric * &sol.w));
        Ok((sol, t, solver.condition))
    };
    let within = |t: f64| (t - t0).abs() <= BISECTION_TOLERANCE * t0;

    // below this loading the matrix is numerically unloaded
    let beta_floor = 1e-12 * c_re.trace().abs().max(f64::MIN_POSITIVE) / p.metric.trace();
    let mut lo = 0.0;
    let mut t_lo = f64::INFINITY;
    let mut hi = 1.0;
    let mut doublings = 0;
    let mut upper = evaluate(hi)?;
    while upper.1 > t0 && !within(upper.1) {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::Bisection("no loading level reaches the sensitivity cap".into()));
        }
        lo = hi;
        t_lo = upper.1;
        hi *= 2.0;
        upper = evaluate(hi)?;
    }
    let mut t_hi = upper.1;
    let mut beta = hi;
    let mut current = upper;
    let mut iterations = 0;
    while !within(current.1) {
        iterations += 1;
        if iterations > BISECTION_MAX_ITERATIONS {
            return Err(Error::Bisection(format!(
                "no convergence in {BISECTION_MAX_ITERATIONS} iterations (beta in [{lo:e}, {hi:e}])"
            )));
        }
        if hi - lo < beta_floor {
            // the cap is met at the smallest distinguishable loading
            break;
        }
        let mid = 0.5 * (lo + hi);
        let trial = match evaluate(mid) {
            Ok(t) => t,
            // only the unloaded end of the bracket can be singular
            Err(Error::IllConditioned { .. }) => {
                lo = mid;
                continue;
            }
            Err(e) => return Err(e),
        };
        let t = trial.1;
        let slack = 1e-9 * t0;
        if t > t_lo + slack || t < t_hi - slack {
            return Err(Error::Bisection(format!(
                "sensitivity not monotone in beta: T({mid:e}) = {t:e} outside [{t_hi:e}, {t_lo:e}]"
            )));
        }
        if t > t0 {
            lo = mid;
            t_lo = t;
        } else {
            hi = mid;
            t_hi = t;
            beta = mid;
            current = trial;
            continue;
        }
        if within(t) {
            beta = mid;
            current = trial;
        }
    }
    let (sol, _, condition) = current;
    finish(
        p,
        DesignKind::BoundedSensitivityReal,
        p.c.cost().name(),
        WeightVector::from_real(sol.w.as_slice(), p.domain, p.look),
        Some(sol.phi),
        beta,
        Some(condition),
        Some(-1.0 / sol.den),
    )
}

/// Complex minimum-sensitivity weights `(S^-1 b / b^H S^-1 b)^*`.
pub fn min_sensitivity_complex(p: &DesignProblem) -> Result<DesignResult> {
    let solver = HpdSolver::new(&p.metric.map(|x| Complex64::new(x, 0.0)))?;
    let x = solver.solve(&p.b);
    let den = p.b.dotc(&x).re;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Domain("look manifold is zero".into()));
    }
    let w = x.map(|z| (z / den).conj());
    finish(
        p,
        DesignKind::MinSensitivityComplex,
        "none",
        WeightVector::from_complex(w.iter().copied().collect(), p.domain, p.look),
        None,
        0.0,
        Some(solver.condition),
        Some(-1.0 / den),
    )
}

/// Real minimum-sensitivity weights; their sensitivity is `T_min^r`.
pub fn min_sensitivity_real(p: &DesignProblem) -> Result<DesignResult> {
    let solver = HpdSolver::new(&p.metric)?;
    let sol = real_solution(&solver, &p.b)?;
    finish(
        p,
        DesignKind::MinSensitivityReal,
        "none",
        WeightVector::from_real(sol.w.as_slice(), p.domain, p.look),
        Some(sol.phi),
        0.0,
        Some(solver.condition),
        Some(-1.0 / sol.den),
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p: &DesignProblem,
    kind: DesignKind,
    cost: &str,
    weights: WeightVector,
    phase_phi: Option<f64>,
    beta: f64,
    condition_number: Option<f64>,
    lagrange_lambda: Option<f64>,
) -> Result<DesignResult> {
    let w = weights.to_dvector();
    let gain = weights.response(&p.b)?.norm_sqr();
    let den = p.c_directivity.quadratic_form(&w)?;
    if !(den > 0.0) {
        return Err(Error::Numeric(format!("directivity denominator {den:e} is not positive")));
    }
    let directivity = gain / den;
    let sensitivity = metric_form(&p.metric, &w);
    let bounds = sensitivity_bounds(&p.b, &p.metric)?;
    Ok(DesignResult {
        kind,
        cost: cost.to_string(),
        weights,
        phase_phi,
        beta,
        directivity,
        directivity_index_db: db10(directivity),
        sensitivity,
        sensitivity_db: db10(sensitivity),
        bound_complex: bounds.complex,
        bound_real: bounds.real,
        condition_number,
        lagrange_lambda,
    })
}

/// `w^H S w` for real symmetric `S`.
pub fn metric_form(metric: &DMatrix<f64>, w: &DVector<Complex64>) -> f64 {
    let re = w.map(|z| z.re);
    let im = w.map(|z| z.im);
    re.dot(&(metric * &re)) + im.dot(&(metric * &im))
}

struct RealSolution {
    w: DVector<f64>,
    phi: f64,
    den: f64,
}

// phi = arg(b^T A^-1 b) / 2, c = Re{b e^{-j phi}}, w = A^-1 c / (c^T A^-1 c)
fn real_solution(solver: &HpdSolver<f64>, b: &DVector<Complex64>) -> Result<RealSolution> {
    let x_re = solver.solve(&b.map(|z| z.re));
    let x_im = solver.solve(&b.map(|z| z.im));
    let b_re = b.map(|z| z.re);
    let b_im = b.map(|z| z.im);
    let q = Complex64::new(b_re.dot(&x_re) - b_im.dot(&x_im), b_re.dot(&x_im) + b_im.dot(&x_re));
    let phi = 0.5 * q.arg();
    let rot = Complex64::from_polar(1.0, -phi);
    let c = b.map(|z| (z * rot).re);
    let y = solver.solve(&c);
    let den = c.dot(&y);
    let scale = b_re.dot(&x_re) + b_im.dot(&x_im);
    if !(den > 1e-14 * scale) || !den.is_finite() {
        return Err(Error::DegenerateLook { value: den });
    }
    Ok(RealSolution { w: y / den, phi, den })
}

/// Cholesky solver for a Hermitian positive-definite matrix after symmetric
/// Jacobi scaling `D^-1/2 A D^-1/2`.
struct HpdSolver<T: ComplexField<RealField = f64>> {
    scale: DVector<f64>,
    chol: Cholesky<T, Dyn>,
    condition: f64,
}

impl<T: ComplexField<RealField = f64> + Copy> HpdSolver<T> {
    fn new(a: &DMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].real()).collect();
        if diag.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        let scale = DVector::from_iterator(n, diag.iter().map(|d| 1.0 / d.sqrt()));
        let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * T::from_real(scale[i] * scale[j]));
        let eig = SymmetricEigen::new(scaled.clone()).eigenvalues;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        let chol = Cholesky::new(scaled).ok_or(Error::IllConditioned { condition })?;
        Ok(Self { scale, chol, condition })
    }

    fn solve(&self, rhs: &DVector<T>) -> DVector<T> {
        let n = rhs.len();
        let y = DVector::from_fn(n, |i, _| rhs[i] * T::from_real(self.scale[i]));
        let x = self.chol.solve(&y);
        DVector::from_fn(n, |i, _| x[i] * T::from_real(self.scale[i]))
    }
}
