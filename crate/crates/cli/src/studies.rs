//! The computations behind each subcommand, free of any file handling.

use rayon::prelude::*;
use realbeam::analysis::{beampattern, lobe_analysis, polar_grid, Beampattern, LobeReport, SphereGrid};
use realbeam::cmatrix::{c_linear, CostFunction};
use realbeam::design::{
    max_directivity_complex, max_directivity_real, min_sensitivity_complex, min_sensitivity_real, DesignProblem,
    DesignResult,
};
use realbeam::geometry::{angle_between, ArrayModel, SphericalAngle};
use realbeam::pwd::{default_synthesis_order, pwd_map, sft_pinv, simulate_pressure, NoiseSpec, PwdMap};
use realbeam::{db10, Complex64, SOUND_SPEED};
use serde::{Deserialize, Serialize};

use crate::config::{ArraySpec, CostKind, DesignSpec, RunConfig, Scenario, WeightClass};
use crate::error::{CliError, CliResult};

/// A design and its beampattern with lobe measurements.
#[derive(Debug, Clone)]
pub struct PatternStudy {
    pub label: String,
    pub design: DesignResult,
    pub pattern: Beampattern,
    pub lobes: LobeReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct LobeSummary {
    pub mainlobe_width_deg: f64,
    pub mainlobe_edges_deg: (f64, f64),
    pub sidelobe_deg: Option<f64>,
    pub sidelobe_db: Option<f64>,
    pub parasitic_deg: Option<f64>,
    pub parasitic_db: Option<f64>,
}

impl From<&LobeReport> for LobeSummary {
    fn from(r: &LobeReport) -> Self {
        Self {
            mainlobe_width_deg: r.mainlobe_width.to_degrees(),
            mainlobe_edges_deg: (r.mainlobe_edges.0.to_degrees(), r.mainlobe_edges.1.to_degrees()),
            sidelobe_deg: r.sidelobe.map(|l| l.angle.to_degrees()),
            sidelobe_db: r.sidelobe.map(|l| l.level_db),
            parasitic_deg: r.parasitic.map(|l| l.angle.to_degrees()),
            parasitic_db: r.parasitic.map(|l| l.level_db),
        }
    }
}

/// JSON view of a [`PatternStudy`] without the sampled pattern.
#[derive(Debug, Clone, Serialize)]
pub struct PatternSummary {
    pub label: String,
    pub design: DesignResult,
    pub lobes: LobeSummary,
    pub pattern_points: usize,
}

impl From<&PatternStudy> for PatternSummary {
    fn from(s: &PatternStudy) -> Self {
        Self {
            label: s.label.clone(),
            design: s.design.clone(),
            lobes: LobeSummary::from(&s.lobes),
            pattern_points: s.pattern.angles.len(),
        }
    }
}

pub fn pattern_study(label: &str, cfg: &RunConfig) -> CliResult<PatternStudy> {
    let run = cfg.run_design()?;
    let grid = polar_grid(cfg.grid_step(), &[])?;
    let pattern = beampattern(&run.result.weights, &run.model, &grid)?;
    let lobes = lobe_analysis(&pattern)?;
    Ok(PatternStudy {
        label: label.to_string(),
        design: run.result,
        pattern,
        lobes,
    })
}

pub const FIG1_M: usize = 25;
pub const FIG1_D: f64 = 0.1;
pub const FIG1_F: f64 = 1715.0;
pub const FIG1_LOOK_DEG: f64 = 45.0;

pub fn fig1_config(weights: WeightClass) -> RunConfig {
    let mut design = DesignSpec::new(weights, CostKind::Sin);
    design.look_deg = Some(FIG1_LOOK_DEG);
    RunConfig {
        array: ArraySpec::Linear {
            m: FIG1_M,
            d: FIG1_D,
            f: FIG1_F,
            c: SOUND_SPEED,
        },
        design,
        grid_step_deg: None,
    }
}

#[derive(Debug, Clone)]
pub struct Fig1Study {
    /// `max |C - I|` over all entries.
    pub c_identity_defect: f64,
    pub real: PatternStudy,
    pub complex: PatternStudy,
}

pub fn fig1() -> CliResult<Fig1Study> {
    let c = c_linear(FIG1_M, FIG1_D, SOUND_SPEED / FIG1_F)?;
    let defect = c
        .entries()
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let (i, j) = (k % FIG1_M, k / FIG1_M);
            (z - Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    Ok(Fig1Study {
        c_identity_defect: defect,
        real: pattern_study("real", &fig1_config(WeightClass::Real))?,
        complex: pattern_study("complex", &fig1_config(WeightClass::Complex))?,
    })
}

/// Phase-mode pattern configuration at order `n` and `kr`.
pub fn spherical_config(n: usize, kr: f64, mics: Option<usize>, weights: WeightClass, cost: CostKind) -> RunConfig {
    RunConfig {
        array: ArraySpec::Spherical {
            n,
            kr: Some(kr),
            r: None,
            f: None,
            mics,
        },
        design: DesignSpec::new(weights, cost),
        grid_step_deg: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub kr_min: f64,
    pub kr_max: f64,
    pub kr_step: f64,
    pub mics: Option<usize>,
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        let ok = self.kr_min.is_finite()
            && self.kr_max.is_finite()
            && self.kr_step.is_finite()
            && self.kr_min > 0.0
            && self.kr_max >= self.kr_min
            && self.kr_step > 0.0;
        if !ok {
            return Err(CliError::Usage(format!(
                "kr range must be positive and ascending with a positive step, got {}..{} step {}",
                self.kr_min, self.kr_max, self.kr_step
            )));
        }
        if self.mics == Some(0) {
            return Err(CliError::Usage("mics must be at least 1".into()));
        }
        Ok(())
    }

    /// `kr_min + i * kr_step` up to `kr_max`, tolerating rounding at the end.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.kr_max - self.kr_min) / self.kr_step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.kr_min + i as f64 * self.kr_step).collect()
    }
}

/// Directivity indices and sensitivities (all dB) of the four designs at one `kr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub kr: f64,
    #[serde(rename = "DI_complex_maxdir")]
    pub di_complex_maxdir: f64,
    #[serde(rename = "DI_real_maxdir")]
    pub di_real_maxdir: f64,
    pub sens_complex_maxdir: f64,
    pub sens_real_maxdir: f64,
    #[serde(rename = "DI_complex_minsens")]
    pub di_complex_minsens: f64,
    #[serde(rename = "DI_real_minsens")]
    pub di_real_minsens: f64,
    pub sens_complex_minsens: f64,
    pub sens_real_minsens: f64,
}

impl SweepRow {
    fn failed(kr: f64) -> Self {
        Self {
            kr,
            di_complex_maxdir: f64::NAN,
            di_real_maxdir: f64::NAN,
            sens_complex_maxdir: f64::NAN,
            sens_real_maxdir: f64::NAN,
            di_complex_minsens: f64::NAN,
            di_real_minsens: f64::NAN,
            sens_complex_minsens: f64::NAN,
            sens_real_minsens: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepWarning {
    pub kr: f64,
    pub message: String,
}

fn sweep_point(n: usize, kr: f64, mics: Option<usize>) -> realbeam::Result<SweepRow> {
    let model = ArrayModel::spherical_at_kr(n, kr)?;
    let mut p = DesignProblem::for_model(&model, SphericalAngle::zenith(), &CostFunction::Sin)?;
    if let Some(m) = mics {
        p = p.with_microphones(m)?;
    }
    let cmd = max_directivity_complex(&p)?;
    let rmd = max_directivity_real(&p)?;
    let cms = min_sensitivity_complex(&p)?;
    let rms = min_sensitivity_real(&p)?;
    Ok(SweepRow {
        kr,
        di_complex_maxdir: cmd.directivity_index_db,
        di_real_maxdir: rmd.directivity_index_db,
        sens_complex_maxdir: cmd.sensitivity_db,
        sens_real_maxdir: rmd.sensitivity_db,
        di_complex_minsens: cms.directivity_index_db,
        di_real_minsens: rms.directivity_index_db,
        sens_complex_minsens: cms.sensitivity_db,
        sens_real_minsens: rms.sensitivity_db,
    })
}

/// Rows in ascending `kr`; a failed point yields a NaN row and a warning.
pub fn sweep(cfg: &SweepConfig) -> CliResult<(Vec<SweepRow>, Vec<SweepWarning>)> {
    cfg.validate()?;
    let results: Vec<(f64, realbeam::Result<SweepRow>)> = cfg
        .points()
        .into_par_iter()
        .map(|kr| (kr, sweep_point(cfg.n, kr, cfg.mics)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for (kr, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                rows.push(SweepRow::failed(kr));
                warnings.push(SweepWarning {
                    kr,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok((rows, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Config {
    pub n: usize,
    pub kr: f64,
    pub mics: Option<usize>,
    pub step_theta0_deg: f64,
    pub step_floor: f64,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            n: 10,
            kr: 10.0,
            mics: None,
            step_theta0_deg: CostFunction::DEFAULT_STEP_THETA0_DEG,
            step_floor: CostFunction::DEFAULT_STEP_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub cost: String,
    pub sidelobe_db: f64,
    #[serde(rename = "DI_db")]
    pub di_db: f64,
    pub sens_db: f64,
    pub sens_minus_bound_db: f64,
}

#[derive(Debug, Clone)]
pub struct Table1Study {
    pub rows: Vec<Table1Row>,
    pub studies: Vec<PatternStudy>,
}

pub const TABLE1_COSTS: [CostKind; 4] = [CostKind::Sin, CostKind::Linear, CostKind::Uniform, CostKind::Step];

pub fn cost_label(c: CostKind) -> &'static str {
    match c {
        CostKind::Sin => "sin",
        CostKind::Linear => "linear",
        CostKind::Uniform => "uniform",
        CostKind::Step => "step",
    }
}

/// Real maximum-directivity designs for each cost function.
pub fn table1(cfg: &Table1Config) -> CliResult<Table1Study> {
    let mut rows = Vec::new();
    let mut studies = Vec::new();
    for cost in TABLE1_COSTS {
        let mut rc = spherical_config(cfg.n, cfg.kr, cfg.mics, WeightClass::Real, cost);
        rc.design.step_theta0_deg = cfg.step_theta0_deg;
        rc.design.step_floor = cfg.step_floor;
        let s = pattern_study(cost_label(cost), &rc)?;
        rows.push(Table1Row {
            cost: cost_label(cost).to_string(),
            sidelobe_db: s.lobes.sidelobe.map_or(f64::NAN, |l| l.level_db),
            di_db: s.design.directivity_index_db,
            sens_db: s.design.sensitivity_db,
            sens_minus_bound_db: s.design.sensitivity_db - db10(s.design.bound_real),
        });
        studies.push(s);
    }
    Ok(Table1Study { rows, studies })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Beamformer {
    /// Complex maximum directivity.
    ComplexMd,
    /// Real maximum directivity.
    RealMd,
    /// Real maximum directivity under the linear cost.
    RealLinear,
    All,
}

impl Beamformer {
    pub const EACH: [Beamformer; 3] = [Beamformer::ComplexMd, Beamformer::RealMd, Beamformer::RealLinear];

    pub fn label(self) -> &'static str {
        match self {
            Beamformer::ComplexMd => "complex_md",
            Beamformer::RealMd => "real_md",
            Beamformer::RealLinear => "real_linear",
            Beamformer::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Beamformer> {
        match self {
            Beamformer::All => Self::EACH.to_vec(),
            b => vec![b],
        }
    }
}

#[derive(Debug, Clone)]
pub struct PwdStudy {
    pub kr: f64,
    pub source: SphericalAngle,
    pub layout_points: usize,
    pub synthesis_order: usize,
    pub sft_condition: f64,
    pub sft_residual: f64,
    pub sft_warning: Option<String>,
    pub maps: Vec<(Beamformer, Vec<Complex64>, PwdMap)>,
}

pub fn pwd(scenario: &Scenario, which: Beamformer, seed: u64) -> CliResult<PwdStudy> {
    scenario.validate()?;
    let layout = scenario.layout()?;
    let source = scenario.source_direction()?;
    let model = ArrayModel::spherical(scenario.n, scenario.r_m, scenario.f_hz)?;
    let kr = model.kr().expect("spherical model has kr");
    let synthesis_order = scenario.n_sim.unwrap_or_else(|| default_synthesis_order(kr));
    let noise = scenario.noise_snr_db.map(|snr_db| NoiseSpec { snr_db, seed });
    let snapshot = simulate_pressure(source, kr, &layout, synthesis_order, noise)?;
    let sft = sft_pinv(&snapshot, &layout, scenario.n)?;
    let grid = SphereGrid::regular(scenario.map_step_deg)?;
    let mut maps = Vec::new();
    for b in which.expand() {
        let (cost, real) = match b {
            Beamformer::ComplexMd => (CostFunction::Sin, false),
            Beamformer::RealMd => (CostFunction::Sin, true),
            Beamformer::RealLinear => (CostFunction::Linear, true),
            Beamformer::All => unreachable!("expanded above"),
        };
        let p = DesignProblem::for_model(&model, SphericalAngle::zenith(), &cost)?.with_microphones(layout.len())?;
        let design = if real {
            max_directivity_real(&p)?
        } else {
            max_directivity_complex(&p)?
        };
        let d = design.weights.values().to_vec();
        let map = pwd_map(&sft, &d, &grid)?;
        maps.push((b, d, map));
    }
    Ok(PwdStudy {
        kr,
        source,
        layout_points: layout.len(),
        synthesis_order,
        sft_condition: sft.condition,
        sft_residual: sft.residual,
        sft_warning: sft.warning.clone(),
        maps,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    pub beamformer: &'static str,
    pub weights: Vec<Complex64>,
    pub peak_deg: (f64, f64),
    pub peak_error_deg: f64,
    pub secondary_deg: Option<(f64, f64)>,
    pub secondary_db: Option<f64>,
    /// Angle between the secondary peak and the antipode of the source.
    pub secondary_to_antipode_deg: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PwdReport {
    pub kr: f64,
    pub source_deg: (f64, f64),
    pub layout_points: usize,
    pub synthesis_order: usize,
    pub map_step_deg: f64,
    pub sft_condition: f64,
    pub sft_residual: f64,
    pub sft_warning: Option<String>,
    pub maps: Vec<PeakReport>,
}

impl PwdStudy {
    pub fn report(&self, map_step_deg: f64) -> PwdReport {
        let antipode = self.source.antipode();
        PwdReport {
            kr: self.kr,
            source_deg: self.source.to_degrees(),
            layout_points: self.layout_points,
            synthesis_order: self.synthesis_order,
            map_step_deg,
            sft_condition: self.sft_condition,
            sft_residual: self.sft_residual,
            sft_warning: self.sft_warning.clone(),
            maps: self
                .maps
                .iter()
                .map(|(b, d, m)| PeakReport {
                    beamformer: b.label(),
                    weights: d.clone(),
                    peak_deg: m.peak.to_degrees(),
                    peak_error_deg: angle_between(m.peak, self.source).to_degrees(),
                    secondary_deg: m.secondary.map(|s| s.direction.to_degrees()),
                    secondary_db: m.secondary.map(|s| s.relative_db),
                    secondary_to_antipode_deg: m.secondary.map(|s| angle_between(s.direction, antipode).to_degrees()),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_points_include_both_ends() {
        let cfg = SweepConfig {
            n: 2,
            kr_min: 1.0,
            kr_max: 10.0,
            kr_step: 0.25,
            mics: None,
        };
        let pts = cfg.points();
        assert_eq!(pts.len(), 37);
        assert_eq!(pts[0], 1.0);
        assert!((pts[36] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_descending_range() {
        let cfg = SweepConfig {
            n: 2,
            kr_min: 3.0,
            kr_max: 1.0,
            kr_step: 0.5,
            mics: None,
        };
        assert!(matches!(sweep(&cfg), Err(CliError::Usage(_))));
    }

    #[test]
    fn failed_points_become_nan_rows() {
        // mode strengths of order 10 are not representable at kr = 1e-40
        let cfg = SweepConfig {
            n: 10,
            kr_min: 1e-40,
            kr_max: 1.0,
            kr_step: 0.5,
            mics: None,
        };
        let (rows, warnings) = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].kr, 1e-40);
        assert!(rows[0].di_real_maxdir.is_nan() && rows[0].sens_complex_minsens.is_nan());
        assert!(rows[1..].iter().all(|r| r.di_real_maxdir.is_finite()));
    }

    #[test]
    fn sweep_rows_are_ordered_and_consistent() {
        let cfg = SweepConfig {
            n: 3,
            kr_min: 0.5,
            kr_max: 3.0,
            kr_step: 0.5,
            mics: None,
        };
        let (rows, warnings) = sweep(&cfg).unwrap();
        assert!(warnings.is_empty());
        assert!(rows.windows(2).all(|w| w[0].kr < w[1].kr));
        for r in rows {
            assert!((r.di_complex_maxdir - 20.0 * 4f64.log10()).abs() < 1e-6);
            assert!(r.di_real_maxdir <= r.di_complex_maxdir + 1e-9);
            assert!(r.sens_complex_minsens <= r.sens_real_minsens + 1e-9);
            assert!(r.sens_complex_minsens <= r.sens_complex_maxdir + 1e-9);
        }
    }

    #[test]
    fn pwd_expands_all() {
        let study = pwd(&Scenario::bundled(), Beamformer::All, 0).unwrap();
        let labels: Vec<_> = study.maps.iter().map(|m| m.0.label()).collect();
        assert_eq!(labels, ["complex_md", "real_md", "real_linear"]);
    }
}
