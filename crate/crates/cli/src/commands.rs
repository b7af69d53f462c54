//! Subcommand execution: run a study, write its files, report to stdout.

use std::path::Path;

use realbeam::analysis::SphereGrid;
use realbeam::geometry::SamplingLayout;
use serde::Serialize;

use crate::cli::{
    Cli, Command, DesignArgs, LayoutGenArgs, LayoutKind, PatternArgs, PwdArgs, ReproduceArgs, SweepArgs, Table1Args,
    Target,
};
use crate::config::{CostKind, RunConfig, Scenario, WeightClass};
use crate::error::{CliError, CliResult};
use crate::output::{Meta, Sink};
use crate::studies::{
    self, Beamformer, PatternStudy, PatternSummary, SweepConfig, SweepRow, SweepWarning, Table1Config, Table1Row,
};

/// Runs `cli` and returns what should go to stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    let mut sink = Sink::new(&cli.out)?;
    let shown = match &cli.command {
        Command::Design(a) => design(a, &mut sink)?,
        Command::Pattern(a) => pattern(a, &mut sink)?,
        Command::Sweep(a) => sweep(a, &mut sink)?,
        Command::Table1(a) => table1(a, &mut sink)?,
        Command::Pwd(a) => pwd(a, cli.seed, &mut sink)?,
        Command::LayoutGen(a) => layout_gen(a, &mut sink)?,
        Command::Reproduce(a) => reproduce(a, cli.seed, &mut sink)?,
    };
    Ok(shown.unwrap_or_else(|| listing(&sink)))
}

fn listing(sink: &Sink) -> String {
    sink.written()
        .iter()
        .map(|p| format!("wrote {}\n", p.display()))
        .collect()
}

#[derive(Serialize)]
struct DesignDoc<'a> {
    config: &'a RunConfig,
    result: &'a realbeam::design::DesignResult,
}

#[derive(Serialize)]
struct WeightRow {
    index: usize,
    re: f64,
    im: f64,
}

fn design(a: &DesignArgs, sink: &mut Sink) -> CliResult<Option<String>> {
    let cfg = a.setup.to_config(None)?;
    let run = cfg.run_design()?;
    let meta = Meta::new("design", &cfg)?;
    let text = sink.json(
        "design.json",
        &meta,
        &DesignDoc {
            config: &cfg,
            result: &run.result,
        },
    )?;
    if a.weights_csv {
        let rows: Vec<WeightRow> = run
            .result
            .weights
            .values()
            .iter()
            .enumerate()
            .map(|(index, z)| WeightRow { index, re: z.re, im: z.im })
            .collect();
        sink.csv("weights.csv", &rows)?;
    }
    Ok(Some(text))
}

#[derive(Serialize)]
struct PatternDoc<'a> {
    config: &'a RunConfig,
    grid_step_deg: f64,
    #[serde(flatten)]
    summary: PatternSummary,
}

fn write_pattern(sink: &mut Sink, name: &str, meta: &Meta, cfg: &RunConfig, study: &PatternStudy) -> CliResult<()> {
    sink.csv(&format!("{name}.csv"), &study.pattern.rows())?;
    sink.json(
        &format!("{name}.json"),
        meta,
        &PatternDoc {
            config: cfg,
            grid_step_deg: cfg.grid_step(),
            summary: PatternSummary::from(study),
        },
    )?;
    Ok(())
}

fn pattern(a: &PatternArgs, sink: &mut Sink) -> CliResult<Option<String>> {
    if a.name.is_empty() || a.name.contains(['/', '\\']) {
        return Err(CliError::Usage(format!("--name must be a plain file stem, got {:?}", a.name)));
    }
    let cfg = a.setup.to_config(a.grid_step_deg)?;
    let study = studies::pattern_study(&a.name, &cfg)?;
    let meta = Meta::new("pattern", &cfg)?;
    write_pattern(sink, &a.name, &meta, &cfg, &study)?;
    Ok(None)
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    config: &'a SweepConfig,
    points: usize,
    failed_points: usize,
}

#[derive(Serialize)]
struct WarningsDoc<'a> {
    warnings: &'a [SweepWarning],
}

fn write_sweep(sink: &mut Sink, name: &str, cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    let (rows, warnings) = studies::sweep(cfg)?;
    let meta = Meta::new("sweep", cfg)?;
    sink.csv(&format!("{name}.csv"), &rows)?;
    sink.json(
        &format!("{name}.json"),
        &meta,
        &SweepDoc {
            config: cfg,
            points: rows.len(),
            failed_points: warnings.len(),
        },
    )?;
    sink.json(&format!("{name}_warnings.json"), &meta, &WarningsDoc { warnings: &warnings })?;
    Ok(rows)
}

fn sweep(a: &SweepArgs, sink: &mut Sink) -> CliResult<Option<String>> {
    let cfg = SweepConfig {
        n: a.n,
        kr_min: a.kr_min,
        kr_max: a.kr_max,
        kr_step: a.kr_step,
        mics: a.mics,
    };
    write_sweep(sink, "sweep", &cfg)?;
    Ok(None)
}

#[derive(Serialize)]
struct Table1Doc<'a> {
    config: &'a Table1Config,
    rows: &'a [Table1Row],
    bound_real_db: f64,
    bound_complex_db: f64,
    designs: Vec<PatternSummary>,
}

fn write_table1(sink: &mut Sink, cfg: &Table1Config) -> CliResult<()> {
    let t = studies::table1(cfg)?;
    let first = &t.studies[0].design;
    let meta = Meta::new("table1", cfg)?;
    sink.csv("table1.csv", &t.rows)?;
    sink.json(
        "table1.json",
        &meta,
        &Table1Doc {
            config: cfg,
            rows: &t.rows,
            bound_real_db: realbeam::db10(first.bound_real),
            bound_complex_db: realbeam::db10(first.bound_complex),
            designs: t.studies.iter().map(PatternSummary::from).collect(),
        },
    )?;
    Ok(())
}

fn table1(a: &Table1Args, sink: &mut Sink) -> CliResult<Option<String>> {
    let cfg = Table1Config {
        n: a.n,
        kr: a.kr,
        mics: a.mics,
        step_theta0_deg: a.step_theta0,
        step_floor: a.step_floor,
    };
    if !(cfg.kr > 0.0 && cfg.kr.is_finite()) {
        return Err(CliError::Usage(format!("kr must be positive, got {}", cfg.kr)));
    }
    write_table1(sink, &cfg)?;
    Ok(None)
}

#[derive(Serialize)]
struct PwdConfigHash<'a> {
    scenario: &'a Scenario,
    beamformer: Beamformer,
    seed: u64,
}

fn write_pwd(sink: &mut Sink, scenario: &Scenario, which: Beamformer, seed: u64) -> CliResult<()> {
    let study = studies::pwd(scenario, which, seed)?;
    for (b, _, map) in &study.maps {
        sink.csv(&format!("pwd_{}.csv", b.label()), &map.rows())?;
    }
    let meta = Meta::new(
        "pwd",
        &PwdConfigHash {
            scenario,
            beamformer: which,
            seed,
        },
    )?;
    sink.json("pwd_peaks.json", &meta, &study.report(scenario.map_step_deg))?;
    if let Some(w) = &study.sft_warning {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn pwd(a: &PwdArgs, seed: u64, sink: &mut Sink) -> CliResult<Option<String>> {
    let scenario = match &a.scenario {
        Some(p) => Scenario::load(p)?,
        None => Scenario::bundled(),
    };
    write_pwd(sink, &scenario, a.beamformer, seed)?;
    Ok(None)
}

#[derive(Serialize)]
struct LayoutConfigHash {
    kind: &'static str,
    points: usize,
    n_theta: usize,
    n_phi: usize,
}

#[derive(Serialize)]
struct LayoutDoc {
    file: String,
    points: usize,
    max_order: usize,
}

fn layout_gen(a: &LayoutGenArgs, sink: &mut Sink) -> CliResult<Option<String>> {
    if a.name.is_empty() || a.name.contains(['/', '\\']) {
        return Err(CliError::Usage(format!("--name must be a plain file name, got {:?}", a.name)));
    }
    let (layout, hash) = match a.kind {
        LayoutKind::Fibonacci => (
            SamplingLayout::fibonacci(a.points)?,
            LayoutConfigHash {
                kind: "fibonacci",
                points: a.points,
                n_theta: 0,
                n_phi: 0,
            },
        ),
        LayoutKind::Gauss => (
            SamplingLayout::gauss_product(a.n_theta, a.n_phi)?,
            LayoutConfigHash {
                kind: "gauss",
                points: a.n_theta * a.n_phi,
                n_theta: a.n_theta,
                n_phi: a.n_phi,
            },
        ),
    };
    sink.text(&a.name, &layout.to_json_string())?;
    let max_order = (0..).take_while(|&n| layout.supports_order(n)).last().unwrap_or(0);
    let meta = Meta::new("layout-gen", &hash)?;
    let doc = LayoutDoc {
        file: sink.dir().join(&a.name).display().to_string(),
        points: layout.len(),
        max_order,
    };
    Ok(Some(crate::output::render_json(&meta, &doc)?))
}

#[derive(Serialize)]
struct Fig1Doc {
    c_identity_defect: f64,
    real: PatternSummary,
    complex: PatternSummary,
}

fn reproduce_fig1(sink: &mut Sink) -> CliResult<()> {
    let s = studies::fig1()?;
    let configs = [
        studies::fig1_config(WeightClass::Real),
        studies::fig1_config(WeightClass::Complex),
    ];
    sink.csv("pattern_real.csv", &s.real.pattern.rows())?;
    sink.csv("pattern_complex.csv", &s.complex.pattern.rows())?;
    let meta = Meta::new("reproduce fig1", &configs)?;
    sink.json(
        "fig1.json",
        &meta,
        &Fig1Doc {
            c_identity_defect: s.c_identity_defect,
            real: PatternSummary::from(&s.real),
            complex: PatternSummary::from(&s.complex),
        },
    )?;
    Ok(())
}

pub fn fig2_config() -> SweepConfig {
    SweepConfig {
        n: 10,
        kr_min: 1.0,
        kr_max: 10.0,
        kr_step: 0.25,
        mics: None,
    }
}

fn reproduce_patterns(sink: &mut Sink, label: &str, configs: &[(&str, RunConfig)]) -> CliResult<()> {
    #[derive(Serialize)]
    struct Doc {
        designs: Vec<PatternSummary>,
    }
    let mut designs = Vec::new();
    for (name, cfg) in configs {
        let s = studies::pattern_study(name, cfg)?;
        sink.csv(&format!("pattern_{name}.csv"), &s.pattern.rows())?;
        designs.push(PatternSummary::from(&s));
    }
    let hashed: Vec<&RunConfig> = configs.iter().map(|(_, c)| c).collect();
    let meta = Meta::new(&format!("reproduce {label}"), &hashed)?;
    sink.json(&format!("{label}.json"), &meta, &Doc { designs })?;
    Ok(())
}

fn reproduce_one(target: Target, map_step_deg: f64, seed: u64, root: &mut Sink) -> CliResult<()> {
    let name = match target {
        Target::Fig1 => "fig1",
        Target::Fig2 => "fig2",
        Target::Fig3 => "fig3",
        Target::Fig4 => "fig4",
        Target::Table1 => "table1",
        Target::Fig7 => "fig7",
        Target::All => unreachable!("expanded by the caller"),
    };
    let mut sink = root.subdir(name)?;
    match target {
        Target::Fig1 => reproduce_fig1(&mut sink)?,
        Target::Fig2 => {
            write_sweep(&mut sink, "fig2", &fig2_config())?;
        }
        Target::Fig3 => reproduce_patterns(
            &mut sink,
            "fig3",
            &[
                ("real", studies::spherical_config(10, 10.0, None, WeightClass::Real, CostKind::Sin)),
                ("complex", studies::spherical_config(10, 10.0, None, WeightClass::Complex, CostKind::Sin)),
            ],
        )?,
        Target::Fig4 => reproduce_patterns(
            &mut sink,
            "fig4",
            &[CostKind::Linear, CostKind::Uniform, CostKind::Step].map(|c| {
                (
                    studies::cost_label(c),
                    studies::spherical_config(10, 10.0, None, WeightClass::Real, c),
                )
            }),
        )?,
        Target::Table1 => write_table1(&mut sink, &Table1Config::default())?,
        Target::Fig7 => {
            let mut scenario = Scenario::bundled();
            scenario.map_step_deg = map_step_deg;
            write_pwd(&mut sink, &scenario, Beamformer::All, seed)?;
        }
        Target::All => unreachable!(),
    }
    root.absorb(sink);
    Ok(())
}

fn reproduce(a: &ReproduceArgs, seed: u64, sink: &mut Sink) -> CliResult<Option<String>> {
    SphereGrid::regular(a.map_step_deg).map_err(|e| CliError::Usage(e.to_string()))?;
    let targets = match a.target {
        Target::All => vec![
            Target::Fig1,
            Target::Fig2,
            Target::Fig3,
            Target::Fig4,
            Target::Table1,
            Target::Fig7,
        ],
        t => vec![t],
    };
    for t in targets {
        reproduce_one(t, a.map_step_deg, seed, sink)?;
    }
    Ok(None)
}

/// Exposed for tests that compare bundles.
pub fn bundle_files(dir: &Path) -> std::io::Result<Vec<std::path::PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(dir).expect("inside dir").to_path_buf());
            }
        }
    }
    out.sort();
    Ok(out)
}
