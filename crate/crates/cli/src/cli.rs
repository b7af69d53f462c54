//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use realbeam::analysis::DEFAULT_MAP_STEP_DEG;
use realbeam::SOUND_SPEED;

use crate::config::{ArraySpec, CostKind, DesignSpec, Objective, RunConfig, WeightClass};
use crate::error::{CliError, CliResult};
use crate::studies::Beamformer;

#[derive(Debug, Parser)]
#[command(name = "realbeam", version, about = "Maximum-directivity beamformer design with real-valued weights")]
pub struct Cli {
    /// Directory receiving output files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for simulated sensor noise.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Suppress stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one beamformer and its performance measures.
    Design(DesignArgs),
    /// Export a beampattern cut and its lobe measurements.
    Pattern(PatternArgs),
    /// Directivity and sensitivity of four phase-mode designs over a kr range.
    Sweep(SweepArgs),
    /// Sidelobe, directivity and sensitivity for each cost function.
    Table1(Table1Args),
    /// Simulated plane-wave decomposition maps.
    Pwd(PwdArgs),
    /// Write a nearly uniform sampling layout.
    LayoutGen(LayoutGenArgs),
    /// Regenerate a bundle of reference outputs.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArrayKind {
    Linear,
    Spherical,
    Open,
}

/// Array and design either inline or from a JSON file.
#[derive(Debug, Clone, Args)]
pub struct SetupArgs {
    /// JSON run configuration; excludes the inline array and design flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub array: Option<ArrayKind>,
    /// Number of sensors (linear).
    #[arg(long)]
    pub m: Option<usize>,
    /// Sensor spacing in metres (linear).
    #[arg(long)]
    pub d: Option<f64>,
    /// Frequency in Hz.
    #[arg(long)]
    pub f: Option<f64>,
    /// Speed of sound in m/s (linear and open).
    #[arg(long)]
    pub c: Option<f64>,
    /// Spherical-harmonic order (spherical).
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimensionless frequency (spherical).
    #[arg(long)]
    pub kr: Option<f64>,
    /// Sphere radius in metres (spherical, with --f).
    #[arg(long)]
    pub r: Option<f64>,
    /// Microphone count for the sensitivity metric (spherical); defaults to (N+1)^2.
    #[arg(long)]
    pub mics: Option<usize>,
    /// JSON file with an array of [x, y, z] sensor positions in metres (open).
    #[arg(long)]
    pub positions: Option<PathBuf>,
    /// Look polar angle in degrees.
    #[arg(long)]
    pub look_deg: Option<f64>,
    /// Look azimuth in degrees (open arrays).
    #[arg(long)]
    pub look_phi_deg: Option<f64>,
    #[arg(long, value_enum)]
    pub weights: Option<WeightClass>,
    #[arg(long, value_enum)]
    pub objective: Option<Objective>,
    #[arg(long, value_enum)]
    pub cost: Option<CostKind>,
    /// Step-cost transition angle in degrees.
    #[arg(long)]
    pub step_theta0: Option<f64>,
    /// Step-cost value inside the transition angle.
    #[arg(long)]
    pub step_floor: Option<f64>,
    /// Sensitivity cap in dB for the bounded real design.
    #[arg(long, allow_hyphen_values = true)]
    pub t0_db: Option<f64>,
}

fn missing(flag: &str, array: &str) -> CliError {
    CliError::Usage(format!("--{flag} is required for --array {array}"))
}

impl SetupArgs {
    fn has_inline(&self) -> bool {
        self.array.is_some()
            || self.m.is_some()
            || self.d.is_some()
            || self.f.is_some()
            || self.c.is_some()
            || self.n.is_some()
            || self.kr.is_some()
            || self.r.is_some()
            || self.mics.is_some()
            || self.positions.is_some()
            || self.look_deg.is_some()
            || self.look_phi_deg.is_some()
            || self.weights.is_some()
            || self.objective.is_some()
            || self.cost.is_some()
            || self.step_theta0.is_some()
            || self.step_floor.is_some()
            || self.t0_db.is_some()
    }

    pub fn to_config(&self, grid_step_deg: Option<f64>) -> CliResult<RunConfig> {
        if let Some(path) = &self.config {
            if self.has_inline() {
                return Err(CliError::Usage(
                    "--config cannot be combined with inline array or design flags".into(),
                ));
            }
            let mut cfg = RunConfig::load(path)?;
            if grid_step_deg.is_some() {
                cfg.grid_step_deg = grid_step_deg;
            }
            cfg.validate()?;
            return Ok(cfg);
        }
        let kind = self
            .array
            .ok_or_else(|| CliError::Usage("--array is required unless --config is given".into()))?;
        let array = match kind {
            ArrayKind::Linear => ArraySpec::Linear {
                m: self.m.ok_or_else(|| missing("m", "linear"))?,
                d: self.d.ok_or_else(|| missing("d", "linear"))?,
                f: self.f.ok_or_else(|| missing("f", "linear"))?,
                c: self.c.unwrap_or(SOUND_SPEED),
            },
            ArrayKind::Spherical => ArraySpec::Spherical {
                n: self.n.ok_or_else(|| missing("n", "spherical"))?,
                kr: self.kr,
                r: self.r,
                f: self.f,
                mics: self.mics,
            },
            ArrayKind::Open => {
                let path = self.positions.as_ref().ok_or_else(|| missing("positions", "open"))?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                let positions: Vec<[f64; 3]> = serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                ArraySpec::Open {
                    positions,
                    f: self.f.ok_or_else(|| missing("f", "open"))?,
                    c: self.c.unwrap_or(SOUND_SPEED),
                }
            }
        };
        let weights = self
            .weights
            .ok_or_else(|| CliError::Usage("--weights is required".into()))?;
        let mut design = DesignSpec::new(weights, self.cost.unwrap_or_default());
        design.look_deg = self.look_deg;
        design.look_phi_deg = self.look_phi_deg.unwrap_or(0.0);
        design.objective = self.objective.unwrap_or_default();
        if let Some(t) = self.step_theta0 {
            design.step_theta0_deg = t;
        }
        if let Some(fl) = self.step_floor {
            design.step_floor = fl;
        }
        design.t0_db = self.t0_db;
        let cfg = RunConfig {
            array,
            design,
            grid_step_deg,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    /// Also write the weights as CSV.
    #[arg(long)]
    pub weights_csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PatternArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    /// Polar grid step in degrees, at most 0.1.
    #[arg(long)]
    pub grid_step_deg: Option<f64>,
    /// Base name of the output files.
    #[arg(long, default_value = "pattern")]
    pub name: String,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub kr_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub kr_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub kr_step: f64,
    /// Microphone count for the sensitivity metric; defaults to (N+1)^2.
    #[arg(long)]
    pub mics: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 10.0)]
    pub kr: f64,
    #[arg(long)]
    pub mics: Option<usize>,
    #[arg(long, default_value_t = realbeam::cmatrix::CostFunction::DEFAULT_STEP_THETA0_DEG)]
    pub step_theta0: f64,
    #[arg(long, default_value_t = realbeam::cmatrix::CostFunction::DEFAULT_STEP_FLOOR)]
    pub step_floor: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PwdArgs {
    /// Scenario JSON; the bundled reference scenario is used when absent.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub beamformer: Beamformer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutKind {
    Fibonacci,
    /// Gauss-Legendre rows in theta times a uniform phi ring.
    Gauss,
}

#[derive(Debug, Clone, Args)]
pub struct LayoutGenArgs {
    #[arg(long, value_enum, default_value = "fibonacci")]
    pub kind: LayoutKind,
    /// Number of points (fibonacci).
    #[arg(long, default_value_t = 32)]
    pub points: usize,
    /// Rows in theta (gauss).
    #[arg(long, default_value_t = 6)]
    pub n_theta: usize,
    /// Points per row (gauss).
    #[arg(long, default_value_t = 12)]
    pub n_phi: usize,
    /// Output file name inside --out.
    #[arg(long, default_value = "layout.json")]
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Table1,
    Fig7,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Map step for the plane-wave decomposition bundle, degrees.
    #[arg(long, default_value_t = DEFAULT_MAP_STEP_DEG)]
    pub map_step_deg: f64,
}
