//! Validated run configurations. Every type here rejects unknown JSON fields
//! so that a misspelt key fails loudly instead of silently taking a default.

use std::path::{Path, PathBuf};

use realbeam::analysis::{DEFAULT_MAP_STEP_DEG, DEFAULT_STEP_DEG, MAX_LOBE_STEP_DEG};
use realbeam::cmatrix::CostFunction;
use realbeam::design::{
    bounded_sensitivity_real, max_directivity_complex, max_directivity_real, min_sensitivity_complex,
    min_sensitivity_real, DesignProblem, DesignResult,
};
use realbeam::geometry::{ArrayGeometry, ArrayModel, SamplingLayout, SphericalAngle};
use realbeam::{from_db10, SOUND_SPEED};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn default_sound_speed() -> f64 {
    SOUND_SPEED
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require_positive(name: &str, x: f64) -> CliResult<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("{name} must be positive and finite, got {x}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArraySpec {
    /// Uniform linear array along the z axis.
    Linear {
        m: usize,
        d: f64,
        f: f64,
        #[serde(default = "default_sound_speed")]
        c: f64,
    },
    /// Rigid sphere in the phase-mode domain, given either `kr` or both `r`
    /// and `f`. `mics` sets the microphone count used by the sensitivity
    /// metric and defaults to `(n + 1)^2`.
    Spherical {
        n: usize,
        #[serde(default)]
        kr: Option<f64>,
        #[serde(default)]
        r: Option<f64>,
        #[serde(default)]
        f: Option<f64>,
        #[serde(default)]
        mics: Option<usize>,
    },
    /// Arbitrary sensor positions in metres.
    Open {
        positions: Vec<[f64; 3]>,
        f: f64,
        #[serde(default = "default_sound_speed")]
        c: f64,
    },
}

impl ArraySpec {
    pub fn validate(&self) -> CliResult<()> {
        match self {
            ArraySpec::Linear { m, d, f, c } => {
                if *m == 0 {
                    return Err(usage("linear array needs m >= 1"));
                }
                require_positive("d", *d)?;
                require_positive("f", *f)?;
                require_positive("c", *c)
            }
            ArraySpec::Spherical { kr, r, f, mics, .. } => {
                match (kr, r, f) {
                    (Some(kr), None, None) => require_positive("kr", *kr)?,
                    (None, Some(r), Some(f)) => {
                        require_positive("r", *r)?;
                        require_positive("f", *f)?;
                    }
                    _ => return Err(usage("spherical array needs either kr, or both r and f")),
                }
                if *mics == Some(0) {
                    return Err(usage("mics must be at least 1"));
                }
                Ok(())
            }
            ArraySpec::Open { positions, f, c } => {
                if positions.is_empty() {
                    return Err(usage("open array needs at least one position"));
                }
                if positions.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(usage("sensor positions must be finite"));
                }
                require_positive("f", *f)?;
                require_positive("c", *c)
            }
        }
    }

    pub fn model(&self) -> CliResult<ArrayModel> {
        self.validate()?;
        let model = match self {
            ArraySpec::Linear { m, d, f, c } => ArrayModel::new(
                ArrayGeometry::Linear {
                    sensors: *m,
                    spacing: *d,
                },
                *f,
                *c,
            )?,
            ArraySpec::Spherical { n, kr, r, f, .. } => match (kr, r, f) {
                (Some(kr), _, _) => ArrayModel::spherical_at_kr(*n, *kr)?,
                (None, Some(r), Some(f)) => ArrayModel::spherical(*n, *r, *f)?,
                _ => unreachable!("validated above"),
            },
            ArraySpec::Open { positions, f, c } => ArrayModel::new(
                ArrayGeometry::GenericOpen {
                    positions: positions.clone(),
                },
                *f,
                *c,
            )?,
        };
        Ok(model)
    }

    fn is_spherical(&self) -> bool {
        matches!(self, ArraySpec::Spherical { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum WeightClass {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    MaxDirectivity,
    MinSensitivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    #[default]
    Sin,
    Linear,
    Uniform,
    Step,
}

impl CostKind {
    pub fn function(self, step_theta0_deg: f64, step_floor: f64) -> CostFunction {
        match self {
            CostKind::Sin => CostFunction::Sin,
            CostKind::Linear => CostFunction::Linear,
            CostKind::Uniform => CostFunction::Uniform,
            CostKind::Step => CostFunction::Step {
                theta0: step_theta0_deg.to_radians(),
                floor: step_floor,
            },
        }
    }
}

fn default_theta0() -> f64 {
    CostFunction::DEFAULT_STEP_THETA0_DEG
}

fn default_floor() -> f64 {
    CostFunction::DEFAULT_STEP_FLOOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    /// Look direction in degrees. Required for linear and open arrays;
    /// phase-mode designs do not depend on it.
    #[serde(default)]
    pub look_deg: Option<f64>,
    #[serde(default)]
    pub look_phi_deg: f64,
    pub weights: WeightClass,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default)]
    pub cost: CostKind,
    #[serde(default = "default_theta0")]
    pub step_theta0_deg: f64,
    #[serde(default = "default_floor")]
    pub step_floor: f64,
    /// Sensitivity cap in dB; selects the bounded real design.
    #[serde(default)]
    pub t0_db: Option<f64>,
}

impl DesignSpec {
    pub fn new(weights: WeightClass, cost: CostKind) -> Self {
        Self {
            look_deg: None,
            look_phi_deg: 0.0,
            weights,
            objective: Objective::MaxDirectivity,
            cost,
            step_theta0_deg: default_theta0(),
            step_floor: default_floor(),
            t0_db: None,
        }
    }

    pub fn cost_function(&self) -> CostFunction {
        self.cost.function(self.step_theta0_deg, self.step_floor)
    }
}

/// Everything `design` and `pattern` need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub array: ArraySpec,
    pub design: DesignSpec,
    /// Polar grid step for beampatterns, degrees.
    #[serde(default)]
    pub grid_step_deg: Option<f64>,
}

/// A design together with the model and problem it was computed from.
pub struct DesignRun {
    pub model: ArrayModel,
    pub problem: DesignProblem,
    pub result: DesignResult,
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step_deg.unwrap_or(DEFAULT_STEP_DEG)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.array.validate()?;
        let d = &self.design;
        match d.look_deg {
            Some(t) if !(0.0..=180.0).contains(&t) => {
                return Err(usage(format!("look-deg must lie in [0, 180], got {t}")))
            }
            None if !self.array.is_spherical() => {
                return Err(usage("look-deg is required for linear and open arrays"))
            }
            _ => {}
        }
        if !d.look_phi_deg.is_finite() {
            return Err(usage("look-phi-deg must be finite"));
        }
        if let Some(t0) = d.t0_db {
            if !t0.is_finite() {
                return Err(usage("t0-db must be finite"));
            }
            if d.weights != WeightClass::Real || d.objective != Objective::MaxDirectivity {
                return Err(usage("t0-db applies to the real maximum-directivity design only"));
            }
        }
        d.cost_function().validate().map_err(|e| usage(e.to_string()))?;
        if let Some(step) = self.grid_step_deg {
            if !(step > 0.0 && step <= MAX_LOBE_STEP_DEG) {
                return Err(usage(format!(
                    "grid step must lie in (0, {MAX_LOBE_STEP_DEG}] degrees, got {step}"
                )));
            }
        }
        Ok(())
    }

    pub fn look(&self) -> CliResult<SphericalAngle> {
        let theta = self.design.look_deg.unwrap_or(0.0);
        Ok(SphericalAngle::from_degrees(theta, self.design.look_phi_deg.rem_euclid(360.0))?)
    }

    pub fn run_design(&self) -> CliResult<DesignRun> {
        self.validate()?;
        let model = self.array.model()?;
        let look = self.look()?;
        let mut problem = DesignProblem::for_model(&model, look, &self.design.cost_function())?;
        if let ArraySpec::Spherical { mics: Some(m), .. } = self.array {
            problem = problem.with_microphones(m)?;
        }
        let d = &self.design;
        let result = match (d.weights, d.objective, d.t0_db) {
            (WeightClass::Complex, Objective::MaxDirectivity, _) => max_directivity_complex(&problem)?,
            (WeightClass::Real, Objective::MaxDirectivity, None) => max_directivity_real(&problem)?,
            (WeightClass::Real, Objective::MaxDirectivity, Some(t0)) => {
                bounded_sensitivity_real(&problem, from_db10(t0))?
            }
            (WeightClass::Complex, Objective::MinSensitivity, _) => min_sensitivity_complex(&problem)?,
            (WeightClass::Real, Objective::MinSensitivity, _) => min_sensitivity_real(&problem)?,
        };
        Ok(DesignRun { model, problem, result })
    }
}

fn default_map_step() -> f64 {
    DEFAULT_MAP_STEP_DEG
}

/// Simulated plane-wave-decomposition experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Source direction `[theta, phi]` in degrees.
    pub source: [f64; 2],
    pub f_hz: f64,
    pub r_m: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Layout file, relative to the scenario file. The bundled 32-point
    /// layout is used when absent.
    #[serde(default)]
    pub layout_path: Option<PathBuf>,
    #[serde(default)]
    pub noise_snr_db: Option<f64>,
    /// Order of the synthesised field; defaults to `ceil(kr) + 4`.
    #[serde(default)]
    pub n_sim: Option<usize>,
    #[serde(default = "default_map_step")]
    pub map_step_deg: f64,
}

pub const BUNDLED_SCENARIO: &str = include_str!("../data/scenario_fig7.json");

impl Scenario {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_SCENARIO).expect("bundled scenario parses")
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let mut s: Scenario =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        if let (Some(rel), Some(dir)) = (&s.layout_path, path.parent()) {
            if rel.is_relative() {
                s.layout_path = Some(dir.join(rel));
            }
        }
        Ok(s)
    }

    pub fn validate(&self) -> CliResult<()> {
        let [theta, phi] = self.source;
        if !(0.0..=180.0).contains(&theta) || !phi.is_finite() {
            return Err(usage(format!("source ({theta}, {phi}) is not a valid direction")));
        }
        require_positive("f_hz", self.f_hz)?;
        require_positive("r_m", self.r_m)?;
        if let Some(snr) = self.noise_snr_db {
            if !snr.is_finite() {
                return Err(usage("noise_snr_db must be finite"));
            }
        }
        if let Some(ns) = self.n_sim {
            if ns < self.n {
                return Err(usage(format!("n_sim {ns} is below the analysis order {}", self.n)));
            }
        }
        if !(self.map_step_deg > 0.0 && self.map_step_deg <= 90.0) {
            return Err(usage(format!("map_step_deg must lie in (0, 90], got {}", self.map_step_deg)));
        }
        Ok(())
    }

    pub fn source_direction(&self) -> CliResult<SphericalAngle> {
        Ok(SphericalAngle::from_degrees(self.source[0], self.source[1].rem_euclid(360.0))?)
    }

    pub fn layout(&self) -> CliResult<SamplingLayout> {
        match &self.layout_path {
            None => Ok(SamplingLayout::bundled_32()),
            Some(p) => SamplingLayout::load(p).map_err(|e| usage(format!("{}: {e}", p.display()))),
        }
    }

    pub fn kr(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_hz * self.r_m / SOUND_SPEED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = r#"{"array":{"kind":"linear","m":4,"d":0.1,"f":1000,"extra":1},
                      "design":{"look_deg":30,"weights":"real"}}"#;
        assert!(matches!(RunConfig::from_json_str(bad), Err(CliError::Usage(_))));
        let bad_top = r#"{"array":{"kind":"spherical","n":3,"kr":2},
                          "design":{"weights":"real"},"colour":"red"}"#;
        assert!(RunConfig::from_json_str(bad_top).is_err());
        let bad_scenario = r#"{"source":[1,2],"f_hz":1,"r_m":1,"N":2,"snr":3}"#;
        assert!(serde_json::from_str::<Scenario>(bad_scenario).is_err());
    }

    #[test]
    fn spherical_needs_kr_or_radius_and_frequency() {
        let only_r = ArraySpec::Spherical {
            n: 3,
            kr: None,
            r: Some(0.1),
            f: None,
            mics: None,
        };
        assert!(only_r.validate().is_err());
        let both = ArraySpec::Spherical {
            n: 3,
            kr: Some(2.0),
            r: Some(0.1),
            f: Some(1000.0),
            mics: None,
        };
        assert!(both.validate().is_err());
    }

    #[test]
    fn linear_array_needs_a_look_direction() {
        let cfg = RunConfig {
            array: ArraySpec::Linear {
                m: 4,
                d: 0.1,
                f: 1000.0,
                c: SOUND_SPEED,
            },
            design: DesignSpec::new(WeightClass::Real, CostKind::Sin),
            grid_step_deg: None,
        };
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
    }

    #[test]
    fn cap_requires_real_max_directivity() {
        let mut design = DesignSpec::new(WeightClass::Complex, CostKind::Sin);
        design.t0_db = Some(-10.0);
        let cfg = RunConfig {
            array: ArraySpec::Spherical {
                n: 3,
                kr: Some(2.0),
                r: None,
                f: None,
                mics: None,
            },
            design,
            grid_step_deg: None,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bundled_scenario_matches_the_reference_setup() {
        let s = Scenario::bundled();
        s.validate().unwrap();
        assert_eq!(s.n, 4);
        assert!((s.kr() - 3.9568).abs() < 1e-3);
        assert_eq!(s.layout().unwrap().len(), 32);
    }

    #[test]
    fn relative_layout_path_resolves_against_scenario_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("l.json"), SamplingLayout::fibonacci(30).unwrap().to_json_string()).unwrap();
        let path = dir.path().join("s.json");
        std::fs::write(&path, r#"{"source":[90,0],"f_hz":1000,"r_m":0.1,"N":3,"layout_path":"l.json"}"#).unwrap();
        let s = Scenario::load(&path).unwrap();
        assert_eq!(s.layout().unwrap().len(), 30);
    }
}
