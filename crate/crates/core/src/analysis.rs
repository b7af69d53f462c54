//! Beampatterns, performance measures and lobe bookkeeping.
//!
//! One-dimensional patterns are sampled over a polar angle in `[0, pi]`: the
//! angle from the array axis for linear arrays, the angle from the look
//! direction for phase-mode arrays, and the polar angle at the look azimuth
//! for generic open arrays. Magnitudes are reported in dB relative to the
//! look-direction sample and floored at [`DB_FLOOR`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{CMatrix, CostFunction};
use crate::design::metric_form;
use crate::geometry::{angle_between, ArrayGeometry, ArrayModel, Arrival, Domain, SphericalAngle, WeightVector};
use crate::quad::GaussLegendre;
use crate::{db10, Error, Result};

pub const DB_FLOOR: f64 = -200.0;
pub const DEFAULT_STEP_DEG: f64 = 0.05;
/// Coarsest grid accepted by [`lobe_analysis`].
pub const MAX_LOBE_STEP_DEG: f64 = 0.1;
pub const DEFAULT_MAP_STEP_DEG: f64 = 2.0;
/// Lobes within this many dB of the look direction count as parasitic.
pub const PARASITIC_MARGIN_DB: f64 = 0.5;
const PLATEAU_EPS: f64 = 1e-12;

/// `20 log10 |x|` floored at [`DB_FLOOR`].
pub fn amplitude_db(x: f64) -> f64 {
    if x > 0.0 {
        (20.0 * x.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Uniform grid over `[0, pi]` with spacing at most `step_deg`, plus the
/// angles in `include`. Sorted, without duplicates.
pub fn polar_grid(step_deg: f64, include: &[f64]) -> Result<Vec<f64>> {
    if !(step_deg > 0.0) || step_deg > 180.0 {
        return Err(Error::Domain(format!("grid step {step_deg} deg outside (0, 180]")));
    }
    let n = (180.0 / step_deg).ceil() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
    for &a in include {
        if !(0.0..=PI).contains(&a) {
            return Err(Error::Domain(format!("grid angle {a} outside [0, pi]")));
        }
        grid.push(a);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(grid)
}

/// Sampled one-dimensional beampattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Beampattern {
    pub angles: Vec<f64>,
    pub response: Vec<Complex64>,
    pub magnitude_db: Vec<f64>,
    pub look_index: usize,
}

/// CSV row of a one-dimensional pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub angle_deg: f64,
    pub re: f64,
    pub im: f64,
    pub mag_db: f64,
}

impl Beampattern {
    /// Normalises `response` to the sample at `look_angle`, which must lie on
    /// the grid.
    pub fn from_samples(angles: Vec<f64>, response: Vec<Complex64>, look_angle: f64) -> Result<Self> {
        if angles.len() != response.len() {
            return Err(Error::Dimension {
                expected: angles.len(),
                got: response.len(),
            });
        }
        if angles.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("pattern angles must be strictly increasing".into()));
        }
        let look_index = angles
            .iter()
            .position(|a| (a - look_angle).abs() < 1e-12)
            .ok_or_else(|| Error::Domain(format!("look angle {look_angle} is not a grid sample")))?;
        let reference = response[look_index].norm();
        if !(reference > 0.0) {
            return Err(Error::Numeric("zero response in the look direction".into()));
        }
        let magnitude_db = response.iter().map(|z| amplitude_db(z.norm() / reference)).collect();
        Ok(Self {
            angles,
            response,
            magnitude_db,
            look_index,
        })
    }

    pub fn look_angle(&self) -> f64 {
        self.angles[self.look_index]
    }

    /// Level at the sample nearest to `angle`.
    pub fn level_at(&self, angle: f64) -> f64 {
        let i = self
            .angles
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - angle).abs().total_cmp(&(b.1 - angle).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.magnitude_db[i]
    }

    pub fn rows(&self) -> Vec<PatternRow> {
        self.angles
            .iter()
            .zip(&self.response)
            .zip(&self.magnitude_db)
            .map(|((a, z), db)| PatternRow {
                angle_deg: a.to_degrees(),
                re: z.re,
                im: z.im,
                mag_db: *db,
            })
            .collect()
    }
}

/// Polar angle of the look direction in the 1-D parameterisation of `model`.
pub fn look_polar_angle(model: &ArrayModel, look: SphericalAngle) -> f64 {
    match model.domain() {
        Domain::PhaseMode => 0.0,
        Domain::Spatial => look.theta,
    }
}

fn cut_arrival(model: &ArrayModel, look: SphericalAngle, theta: f64) -> Result<Arrival> {
    Ok(match model.geometry() {
        ArrayGeometry::GenericOpen { .. } => Arrival::Direction(SphericalAngle::new(theta, look.phi)?),
        _ => Arrival::Polar(theta),
    })
}

/// `B = w^T v` over `angles`, normalised to the look direction, which is
/// inserted into the grid if missing.
pub fn beampattern(w: &WeightVector, model: &ArrayModel, angles: &[f64]) -> Result<Beampattern> {
    if w.len() != model.manifold_len() {
        return Err(Error::Dimension {
            expected: model.manifold_len(),
            got: w.len(),
        });
    }
    let look = look_polar_angle(model, w.look());
    let mut grid = angles.to_vec();
    if !grid.iter().any(|a| (a - look).abs() < 1e-12) {
        grid.push(look);
        grid.sort_by(f64::total_cmp);
    }
    let response = grid
        .iter()
        .map(|&t| w.response(&model.manifold(cut_arrival(model, w.look(), t)?)?))
        .collect::<Result<Vec<_>>>()?;
    Beampattern::from_samples(grid, response, look)
}

/// Regular `(theta, phi)` product grid. `theta` includes both poles, `phi`
/// covers `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl SphereGrid {
    pub fn regular(step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0) || step_deg > 90.0 {
            return Err(Error::Domain(format!("map step {step_deg} deg outside (0, 90]")));
        }
        let nt = (180.0 / step_deg).round() as usize;
        let np = (360.0 / step_deg).round() as usize;
        if ((nt as f64) * step_deg - 180.0).abs() > 1e-9 || ((np as f64) * step_deg - 360.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("map step {step_deg} deg does not divide 180")));
        }
        Ok(Self {
            thetas: (0..=nt).map(|i| (i as f64 * step_deg).to_radians()).collect(),
            phis: (0..np).map(|j| (j as f64 * step_deg).to_radians()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.thetas.len() * self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index.
    pub fn index(&self, i_theta: usize, i_phi: usize) -> usize {
        i_theta * self.phis.len() + i_phi
    }

    pub fn direction(&self, i_theta: usize, i_phi: usize) -> SphericalAngle {
        SphericalAngle {
            theta: self.thetas[i_theta],
            phi: self.phis[i_phi],
        }
    }

    /// Angular step in azimuth.
    pub fn phi_step(&self) -> f64 {
        2.0 * PI / self.phis.len() as f64
    }
}

/// CSV row of a full-sphere map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub mag_db: f64,
}

/// Full-sphere beampattern magnitudes in dB relative to the look direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereMap {
    pub grid: SphereGrid,
    pub response: Vec<Complex64>,
    pub magnitude_db: Vec<f64>,
}

impl SphereMap {
    pub fn rows(&self) -> Vec<MapRow> {
        let mut rows = Vec::with_capacity(self.grid.len());
        for (i, t) in self.grid.thetas.iter().enumerate() {
            for (j, p) in self.grid.phis.iter().enumerate() {
                rows.push(MapRow {
                    theta_deg: t.to_degrees(),
                    phi_deg: p.to_degrees(),
                    mag_db: self.magnitude_db[self.grid.index(i, j)],
                });
            }
        }
        rows
    }
}

/// Beampattern over the whole sphere. Phase-mode patterns depend only on the
/// angle from the look direction.
pub fn beampattern_sphere(w: &WeightVector, model: &ArrayModel, grid: &SphereGrid) -> Result<SphereMap> {
    if w.len() != model.manifold_len() {
        return Err(Error::Dimension {
            expected: model.manifold_len(),
            got: w.len(),
        });
    }
    let eval = |dir: SphericalAngle| -> Result<Complex64> {
        let arrival = match model.domain() {
            Domain::PhaseMode => Arrival::Polar(angle_between(dir, w.look())),
            Domain::Spatial => Arrival::Direction(dir),
        };
        w.response(&model.manifold(arrival)?)
    };
    let reference = eval(w.look())?.norm();
    if !(reference > 0.0) {
        return Err(Error::Numeric("zero response in the look direction".into()));
    }
    let mut response = Vec::with_capacity(grid.len());
    for i in 0..grid.thetas.len() {
        for j in 0..grid.phis.len() {
            response.push(eval(grid.direction(i, j))?);
        }
    }
    let magnitude_db = response.iter().map(|z| amplitude_db(z.norm() / reference)).collect();
    Ok(SphereMap {
        grid: grid.clone(),
        response,
        magnitude_db,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Directivity {
    pub d: f64,
    pub di_db: f64,
}

/// `D = |w^T b|^2 / (w^T C w^*)` with the sine-cost `C`.
pub fn directivity(w: &WeightVector, c_sin: &CMatrix, b: &DVector<Complex64>) -> Result<Directivity> {
    if *c_sin.cost() != CostFunction::Sin {
        return Err(Error::Domain(format!(
            "directivity needs the sine-cost matrix, got cost '{}'",
            c_sin.cost().name()
        )));
    }
    let den = c_sin.quadratic_form(&w.to_dvector())?;
    if !(den > 0.0) {
        return Err(Error::Numeric(format!("directivity denominator {den:e} is not positive")));
    }
    let d = w.response(b)?.norm_sqr() / den;
    Ok(Directivity { d, di_db: db10(d) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub t: f64,
    pub t_db: f64,
}

/// `T = w^H S w`.
pub fn sensitivity(w: &WeightVector, metric: &DMatrix<f64>) -> Result<Sensitivity> {
    if metric.nrows() != w.len() || metric.ncols() != w.len() {
        return Err(Error::Dimension {
            expected: w.len(),
            got: metric.nrows(),
        });
    }
    let t = metric_form(metric, &w.to_dvector());
    Ok(Sensitivity { t, t_db: db10(t) })
}

/// Directivity from the pattern itself: `|B(look)|^2` over the sphere average
/// of `|B|^2`, by Gauss-Legendre quadrature in `cos theta` (and the trapezoid
/// rule in azimuth for generic open arrays).
pub fn directivity_from_pattern(w: &WeightVector, model: &ArrayModel, nodes: usize) -> Result<f64> {
    let look = look_polar_angle(model, w.look());
    let peak = w.response(&model.manifold(cut_arrival(model, w.look(), look)?)?)?.norm_sqr();
    let rule = GaussLegendre::new(nodes);
    let mean = match model.geometry() {
        ArrayGeometry::GenericOpen { .. } => {
            let n_phi = 2 * nodes;
            let mut acc = 0.0;
            for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
                for j in 0..n_phi {
                    let dir = SphericalAngle::new(x.acos(), 2.0 * PI * j as f64 / n_phi as f64)?;
                    acc += wt * w.response(&model.manifold(Arrival::Direction(dir))?)?.norm_sqr();
                }
            }
            acc / (2.0 * n_phi as f64)
        }
        _ => {
            let mut acc = 0.0;
            for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
                acc += wt * w.response(&model.manifold(Arrival::Polar(x.acos()))?)?.norm_sqr();
            }
            acc / 2.0
        }
    };
    if !(mean > 0.0) {
        return Err(Error::Numeric("pattern has no energy".into()));
    }
    Ok(peak / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    pub angle: f64,
    pub level_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeReport {
    /// Null-to-null width; mirrored about the look direction when it sits at
    /// an end of the grid.
    pub mainlobe_width: f64,
    /// Angles of the minima bounding the main lobe.
    pub mainlobe_edges: (f64, f64),
    /// Highest level outside the main and parasitic lobes.
    pub sidelobe: Option<Lobe>,
    pub parasitic: Option<Lobe>,
}

/// Main-lobe extent, parasitic lobe and highest sidelobe of `pattern`.
pub fn lobe_analysis(pattern: &Beampattern) -> Result<LobeReport> {
    let a = &pattern.angles;
    let mag = &pattern.magnitude_db;
    let step = a.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max).to_degrees();
    if step > MAX_LOBE_STEP_DEG + 1e-9 {
        return Err(Error::GridTooCoarse {
            step_deg: step,
            max_deg: MAX_LOBE_STEP_DEG,
        });
    }
    let n = a.len();
    let i0 = pattern.look_index;
    let lo = lobe_edge(mag, i0, false);
    let hi = lobe_edge(mag, i0, true);
    let mainlobe_width = if i0 == 0 {
        2.0 * (a[hi] - a[i0])
    } else if i0 == n - 1 {
        2.0 * (a[i0] - a[lo])
    } else {
        a[hi] - a[lo]
    };

    let outside_main = |i: usize| i < lo || i > hi;
    let parasitic_index = (0..n)
        .filter(|&i| outside_main(i) && is_local_max(mag, i) && mag[i] >= -PARASITIC_MARGIN_DB)
        .max_by(|&x, &y| mag[x].total_cmp(&mag[y]));
    let parasitic_span = parasitic_index.map(|p| (lobe_edge(mag, p, false), lobe_edge(mag, p, true)));

    let sidelobe = (0..n)
        .filter(|&i| outside_main(i) && parasitic_span.is_none_or(|(l, h)| i < l || i > h))
        .max_by(|&x, &y| mag[x].total_cmp(&mag[y]))
        .map(|i| Lobe {
            angle: a[i],
            level_db: mag[i],
        });
    Ok(LobeReport {
        mainlobe_width,
        mainlobe_edges: (a[lo], a[hi]),
        sidelobe,
        parasitic: parasitic_index.map(|i| Lobe {
            angle: a[i],
            level_db: mag[i],
        }),
    })
}

fn is_local_max(mag: &[f64], i: usize) -> bool {
    let left = i == 0 || mag[i] >= mag[i - 1];
    let right = i + 1 == mag.len() || mag[i] >= mag[i + 1];
    left && right
}

/// Walk from `start` until the level rises again after having fallen; the
/// look sample may sit on the rising flank of its lobe.
fn lobe_edge(mag: &[f64], start: usize, forward: bool) -> usize {
    let mut j = start;
    let mut descended = false;
    loop {
        let next = if forward {
            if j + 1 >= mag.len() {
                return j;
            }
            j + 1
        } else {
            if j == 0 {
                return j;
            }
            j - 1
        };
        if mag[next] < mag[j] - PLATEAU_EPS {
            descended = true;
        } else if mag[next] > mag[j] + PLATEAU_EPS && descended {
            return j;
        }
        j = next;
    }
}
