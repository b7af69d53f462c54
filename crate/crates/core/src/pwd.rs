//! Simulated plane-wave decomposition on a rigid sphere.
//!
//! A unit plane wave arriving from `source` produces, at microphone `i`,
//! `p_i = sum_{n <= N_sim} b_n(kr) sum_m conj(Y_n^m(source)) Y_n^m(Omega_i)`.
//! The spherical Fourier coefficients are recovered up to order `N` by least
//! squares, weighted per order by phase-mode weights `d_n` and evaluated over
//! a grid of look directions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analysis::{MapRow, SphereGrid, DB_FLOOR};
use crate::geometry::{SamplingLayout, SphericalAngle};
use crate::specfun::{sh_index, sph_harmonics_all, ModeStrengthSpectrum};
use crate::{db10, Error, Result};

/// Transform condition numbers above this produce a warning.
pub const CONDITION_WARNING: f64 = 1e6;
/// Transform condition numbers above this are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Additive complex white noise at `snr_db` relative to the mean microphone
/// power, drawn from a seeded generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureSnapshot {
    pub kr: f64,
    pub pressures: Vec<Complex64>,
    pub source: SphericalAngle,
    pub synthesis_order: usize,
}

/// `ceil(kr) + 4`.
pub fn default_synthesis_order(kr: f64) -> usize {
    kr.ceil().max(0.0) as usize + 4
}

pub fn simulate_pressure(
    source: SphericalAngle,
    kr: f64,
    layout: &SamplingLayout,
    synthesis_order: usize,
    noise: Option<NoiseSpec>,
) -> Result<PressureSnapshot> {
    let modes = ModeStrengthSpectrum::new(synthesis_order, kr)?;
    let y_src = sph_harmonics_all(synthesis_order, source.theta, source.phi);
    let mut pressures: Vec<Complex64> = layout
        .points()
        .iter()
        .map(|pt| {
            let y = sph_harmonics_all(synthesis_order, pt.theta, pt.phi);
            let mut p = Complex64::new(0.0, 0.0);
            for n in 0..=synthesis_order {
                let mut inner = Complex64::new(0.0, 0.0);
                for m in -(n as i64)..=n as i64 {
                    let k = sh_index(n, m);
                    inner += y_src[k].conj() * y[k];
                }
                p += modes.values[n] * inner;
            }
            p
        })
        .collect();
    if let Some(spec) = noise {
        if !spec.snr_db.is_finite() {
            return Err(Error::Domain(format!("SNR {} dB is not finite", spec.snr_db)));
        }
        let power = pressures.iter().map(|p| p.norm_sqr()).sum::<f64>() / pressures.len() as f64;
        let sigma = (power / 10f64.powf(spec.snr_db / 10.0) / 2.0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for p in &mut pressures {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *p += Complex64::new(sigma * re, sigma * im);
        }
    }
    Ok(PressureSnapshot {
        kr,
        pressures,
        source,
        synthesis_order,
    })
}

/// Least-squares spherical Fourier coefficients, indexed by
/// [`sh_index`](crate::specfun::sh_index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftResult {
    pub order: usize,
    pub coefficients: Vec<Complex64>,
    /// Ratio of extreme singular values of the transform matrix.
    pub condition: f64,
    /// `|| Y p_nm - p ||`.
    pub residual: f64,
    pub warning: Option<String>,
}

/// Pseudo-inverse solution of `Y p_nm = p` over orders `0..=order`.
pub fn sft_pinv(snapshot: &PressureSnapshot, layout: &SamplingLayout, order: usize) -> Result<SftResult> {
    if snapshot.pressures.len() != layout.len() {
        return Err(Error::Dimension {
            expected: layout.len(),
            got: snapshot.pressures.len(),
        });
    }
    let needed = SamplingLayout::min_points(order);
    if layout.len() < needed {
        return Err(Error::LayoutTooSmall {
            points: layout.len(),
            order,
            needed,
        });
    }
    let rows: Vec<Vec<Complex64>> = layout
        .points()
        .iter()
        .map(|pt| sph_harmonics_all(order, pt.theta, pt.phi))
        .collect();
    let y = DMatrix::from_fn(layout.len(), needed, |i, k| rows[i][k]);
    let p = DVector::from_column_slice(&snapshot.pressures);
    let svd = y.clone().svd(true, true);
    let s = &svd.singular_values;
    let (lo, hi) = s.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition });
    }
    let warning = (condition > CONDITION_WARNING)
        .then(|| format!("transform condition number {condition:.3e} exceeds {CONDITION_WARNING:.0e}"));
    let coefficients = svd
        .solve(&p, 0.0)
        .map_err(|e| Error::Numeric(format!("pseudo-inverse failed: {e}")))?;
    let residual = (&y * &coefficients - &p).norm();
    Ok(SftResult {
        order,
        coefficients: coefficients.iter().copied().collect(),
        condition,
        residual,
        warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondaryPeak {
    pub direction: SphericalAngle,
    /// Intensity relative to the main peak, dB.
    pub relative_db: f64,
}

/// `|y|^2` over a sphere grid, normalised to its maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwdMap {
    pub grid: SphereGrid,
    pub output: Vec<Complex64>,
    pub intensity: Vec<f64>,
    pub peak: SphericalAngle,
    pub secondary: Option<SecondaryPeak>,
}

impl PwdMap {
    pub fn rows(&self) -> Vec<MapRow> {
        let mut rows = Vec::with_capacity(self.grid.len());
        for (i, t) in self.grid.thetas.iter().enumerate() {
            for (j, p) in self.grid.phis.iter().enumerate() {
                let v = self.intensity[self.grid.index(i, j)];
                rows.push(MapRow {
                    theta_deg: t.to_degrees(),
                    phi_deg: p.to_degrees(),
                    mag_db: if v > 0.0 { db10(v).max(DB_FLOOR) } else { DB_FLOOR },
                });
            }
        }
        rows
    }
}

/// `y(Omega) = sum_nm p_nm d_n Y_n^m(Omega)` over `grid`.
pub fn pwd_map(sft: &SftResult, d: &[Complex64], grid: &SphereGrid) -> Result<PwdMap> {
    let order = sft.order;
    if d.len() != order + 1 {
        return Err(Error::Dimension {
            expected: order + 1,
            got: d.len(),
        });
    }
    if sft.coefficients.len() != SamplingLayout::min_points(order) {
        return Err(Error::Dimension {
            expected: SamplingLayout::min_points(order),
            got: sft.coefficients.len(),
        });
    }
    let weighted: Vec<Complex64> = (0..=order)
        .flat_map(|n| (-(n as i64)..=n as i64).map(move |m| (n, m)))
        .map(|(n, m)| sft.coefficients[sh_index(n, m)] * d[n])
        .collect();
    let mut output = Vec::with_capacity(grid.len());
    for i in 0..grid.thetas.len() {
        for j in 0..grid.phis.len() {
            let dir = grid.direction(i, j);
            let y = sph_harmonics_all(order, dir.theta, dir.phi);
            output.push(weighted.iter().zip(&y).map(|(a, b)| a * b).sum::<Complex64>());
        }
    }
    let raw: Vec<f64> = output.iter().map(|z| z.norm_sqr()).collect();
    let (peak_index, peak_value) = raw
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
    if !(peak_value > 0.0) {
        return Err(Error::Numeric("decomposition output is identically zero".into()));
    }
    let intensity: Vec<f64> = raw.iter().map(|v| v / peak_value).collect();
    let np = grid.phis.len();
    let peak = grid.direction(peak_index / np, peak_index % np);
    let secondary = secondary_peak(grid, &intensity, peak_index).map(|k| SecondaryPeak {
        direction: grid.direction(k / np, k % np),
        relative_db: db10(intensity[k]),
    });
    Ok(PwdMap {
        grid: grid.clone(),
        output,
        intensity,
        peak,
        secondary,
    })
}

fn is_pole(theta: f64) -> bool {
    !(1e-12..=std::f64::consts::PI - 1e-12).contains(&theta)
}

/// 8-neighbourhood on the grid with azimuth wrap; a pole row is one point
/// whose neighbours are the whole adjacent row.
fn neighbours(grid: &SphereGrid, i: usize, j: usize) -> Vec<usize> {
    let nt = grid.thetas.len();
    let np = grid.phis.len();
    let mut out = Vec::new();
    if is_pole(grid.thetas[i]) {
        for ii in [i.wrapping_sub(1), i + 1] {
            if ii < nt {
                if is_pole(grid.thetas[ii]) {
                    out.push(grid.index(ii, 0));
                } else {
                    out.extend((0..np).map(|jj| grid.index(ii, jj)));
                }
            }
        }
        return out;
    }
    for di in [-1i64, 0, 1] {
        let ii = i as i64 + di;
        if ii < 0 || ii >= nt as i64 {
            continue;
        }
        let ii = ii as usize;
        if is_pole(grid.thetas[ii]) {
            out.push(grid.index(ii, 0));
            continue;
        }
        for dj in [-1i64, 0, 1] {
            if di == 0 && dj == 0 {
                continue;
            }
            let jj = (j as i64 + dj).rem_euclid(np as i64) as usize;
            out.push(grid.index(ii, jj));
        }
    }
    out
}

/// Highest grid-local maximum other than the global one.
fn secondary_peak(grid: &SphereGrid, values: &[f64], primary: usize) -> Option<usize> {
    let np = grid.phis.len();
    let mut best: Option<usize> = None;
    for i in 0..grid.thetas.len() {
        let columns = if is_pole(grid.thetas[i]) { 1 } else { np };
        for j in 0..columns {
            let k = grid.index(i, j);
            if k == primary || (is_pole(grid.thetas[i]) && primary / np == i) {
                continue;
            }
            let v = values[k];
            if neighbours(grid, i, j).iter().all(|&q| values[q] <= v) && best.is_none_or(|b| v > values[b]) {
                best = Some(k);
            }
        }
    }
    best
}

/// Whether `a` and `b` are within one grid cell in both angles.
pub fn within_one_cell(a: SphericalAngle, b: SphericalAngle, step: f64) -> bool {
    let dt = (a.theta - b.theta).abs();
    let dp = (a.phi - b.phi).rem_euclid(2.0 * std::f64::consts::PI);
    let dp = dp.min(2.0 * std::f64::consts::PI - dp);
    let tol = step * (1.0 + 1e-9);
    dt <= tol && (dp <= tol || is_pole(a.theta) || is_pole(b.theta))
}
