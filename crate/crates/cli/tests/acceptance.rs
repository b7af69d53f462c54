//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realbeam::cmatrix::CostFunction;
use realbeam::design::{max_directivity_complex, max_directivity_real, sensitivity_bounds, DesignProblem};
use realbeam::geometry::{ArrayModel, SphericalAngle};
use realbeam::pwd::within_one_cell;
use realbeam::quad::GaussLegendre;
use realbeam::specfun::{legendre_p, sph_bessel, sph_bessel_deriv, BesselKind};
use realbeam::{Complex64, SOUND_SPEED};
use realbeam_cli::commands::{bundle_files, fig2_config};
use realbeam_cli::config::Scenario;
use realbeam_cli::studies::{self, Beamformer, Table1Config};

struct Gate {
    results: Vec<(String, bool)>,
}

impl Gate {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((id.to_string(), pass));
    }

    fn runtime(&mut self, id: &str, elapsed: Duration, limit: Duration) {
        self.check(
            &format!("{id} runtime"),
            elapsed < limit,
            format!("{:.3} s (limit {:.0} s)", elapsed.as_secs_f64(), limit.as_secs_f64()),
        );
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn criterion_1(g: &mut Gate) {
    let start = Instant::now();
    let s = studies::fig1().expect("linear reference design");
    let elapsed = start.elapsed();
    g.check(
        "1(a) C is the identity",
        s.c_identity_defect <= 1e-12,
        format!("max |C - I| = {:.2e}, tolerance 1e-12", s.c_identity_defect),
    );
    let t = s.real.design.sensitivity;
    g.check(
        "1(b) real sensitivity",
        within(t, 0.076, 0.001),
        format!("T = {t:.5}, expected 0.076 +/- 0.001"),
    );
    match s.real.lobes.parasitic {
        Some(l) => {
            let deg = l.angle.to_degrees();
            g.check(
                "1(c) parasitic lobe",
                within(deg, 135.0, 0.5) && within(l.level_db, 0.0, 0.01),
                format!("{deg:.2} deg at {:+.4} dB, expected 135 deg at 0 +/- 0.01 dB", l.level_db),
            );
        }
        None => g.check("1(c) parasitic lobe", false, "no parasitic lobe detected".into()),
    }
    for (label, study) in [("real", &s.real), ("complex", &s.complex)] {
        match study.lobes.sidelobe {
            Some(l) => g.check(
                &format!("1(d) {label} sidelobe"),
                within(l.level_db, -13.0, 0.5),
                format!(
                    "{:.3} dB at {:.2} deg, expected -13 +/- 0.5 dB",
                    l.level_db,
                    l.angle.to_degrees()
                ),
            ),
            None => g.check(&format!("1(d) {label} sidelobe"), false, "no sidelobe detected".into()),
        }
    }
    g.runtime("1", elapsed, Duration::from_secs(1));
}

fn criteria_2_and_3(g: &mut Gate) {
    let start = Instant::now();
    let t = studies::table1(&Table1Config::default()).expect("cost-function table");
    let elapsed = start.elapsed();
    let sin = &t.rows[0];
    assert_eq!(sin.cost, "sin");
    g.check(
        "2 sin sidelobe",
        within(sin.sidelobe_db, -7.9, 0.3),
        format!("{:.3} dB, expected -7.9 +/- 0.3", sin.sidelobe_db),
    );
    g.check(
        "2 sin directivity index",
        within(sin.di_db, 18.5, 0.2),
        format!("{:.3} dB, expected 18.5 +/- 0.2", sin.di_db),
    );
    g.check(
        "2 sin sensitivity above bound",
        within(sin.sens_minus_bound_db, 0.1, 0.15),
        format!("{:+.3} dB, expected +0.1 +/- 0.15", sin.sens_minus_bound_db),
    );
    g.runtime("2", elapsed, Duration::from_secs(1));
    for row in &t.rows[1..] {
        let pass = row.sidelobe_db <= -13.0 && (17.0..=18.5).contains(&row.di_db) && row.di_db < sin.di_db;
        g.check(
            &format!("3 {} row", row.cost),
            pass,
            format!(
                "sidelobe {:.3} dB (<= -13), DI {:.3} dB (in [17, 18.5], below sin {:.3})",
                row.sidelobe_db, row.di_db, sin.di_db
            ),
        );
    }
}

fn criterion_4(g: &mut Gate) {
    let (rows, warnings) = studies::sweep(&fig2_config()).expect("kr sweep");
    g.check(
        "4 sweep completes",
        warnings.is_empty(),
        format!("{} points, {} failures", rows.len(), warnings.len()),
    );
    let gaps: Vec<f64> = rows.iter().map(|r| r.di_complex_maxdir - r.di_real_maxdir).collect();
    let (lo, hi) = gaps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    g.check(
        "4 directivity gap",
        gaps.iter().all(|&x| within(x, 3.0, 1.0)),
        format!("complex minus real DI in [{lo:.3}, {hi:.3}] dB, expected 3 +/- 1 everywhere"),
    );
    let sens_gap = |r: &studies::SweepRow| r.sens_real_maxdir - r.sens_complex_maxdir;
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    let (g1, g10) = (sens_gap(first), sens_gap(last));
    g.check(
        "4 sensitivity gap at low kr",
        first.kr == 1.0 && within(g1, 5.0, 1.5),
        format!("{g1:.3} dB at kr = {}, expected 5 +/- 1.5", first.kr),
    );
    g.check(
        "4 sensitivity gap at high kr",
        (last.kr - 10.0).abs() < 1e-12 && within(g10, 3.0, 1.0) && g10 < g1,
        format!("{g10:.3} dB at kr = {}, expected 3 +/- 1 and below the low-kr gap", last.kr),
    );
}

fn random_complex(rng: &mut ChaCha8Rng, m: usize) -> DVector<Complex64> {
    DVector::from_fn(m, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_spd(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(m, m) * 0.1
}

fn criterion_5(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut ordered, mut trace_err, mut real_gap) = (0usize, 0f64, 0f64);
    for k in 0..100 {
        let m = 2 + k % 7;
        let b = random_complex(&mut rng, m);
        let metric = if k % 2 == 0 {
            DMatrix::identity(m, m)
        } else {
            random_spd(&mut rng, m)
        };
        let bounds = sensitivity_bounds(&b, &metric).expect("bounds");
        if bounds.real >= bounds.complex * (1.0 - 1e-12) {
            ordered += 1;
        }
        if k % 2 == 0 {
            let bhb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
            let sum: f64 = bounds.gammas.iter().sum();
            trace_err = trace_err.max((sum - bhb).abs() / bhb);
        }
        let br = b.map(|z| Complex64::new(z.re, 0.0));
        let rb = sensitivity_bounds(&br, &metric).expect("bounds");
        real_gap = real_gap.max((rb.real - rb.complex).abs() / rb.complex);
    }
    g.check(
        "5 real bound not below complex bound",
        ordered == 100,
        format!("{ordered}/100 randomized manifolds"),
    );
    g.check(
        "5 equality for real manifolds",
        real_gap <= 1e-12,
        format!("max relative difference {real_gap:.2e}, tolerance 1e-12"),
    );
    g.check(
        "5 trace identity",
        trace_err <= 1e-12,
        format!("max relative |sum gamma - b^H b| {trace_err:.2e}, tolerance 1e-12"),
    );
}

fn criterion_6(g: &mut Gate) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0f64;
    let mut count = 0;
    for m in 2..=4usize {
        for k in 0..10u64 {
            let dl = rng.random_range(0.1..0.9);
            let theta = rng.random_range(0.05..PI - 0.05);
            let d = 0.05;
            let model = ArrayModel::linear(m, d, SOUND_SPEED * dl / d).expect("model");
            let p = DesignProblem::for_model(&model, SphericalAngle::new(theta, 0.0).expect("look"), &CostFunction::Sin)
                .expect("problem");
            let closed = max_directivity_real(&p).expect("design").directivity;
            let c = p.c().real_part();
            let a: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| c[(i, j)]).collect()).collect();
            let b: Vec<Complex64> = p.manifold().iter().copied().collect();
            let brute = oracle::max_real_directivity(&a, &b, 1000 * m as u64 + k);
            worst = worst.max((closed - brute).abs() / brute);
            count += 1;
        }
    }
    g.check(
        "6 closed form matches brute force",
        worst <= 1e-3,
        format!("{count} draws, worst relative difference {worst:.2e}, tolerance 1e-3"),
    );
    g.runtime("6", start.elapsed(), Duration::from_secs(60));
}

fn criterion_7(g: &mut Gate) {
    let mut worst = 0f64;
    for n in [2usize, 4, 10] {
        for kr in [0.5, 3.0, 10.0] {
            let model = ArrayModel::spherical_at_kr(n, kr).expect("model");
            let p = DesignProblem::for_model(&model, SphericalAngle::zenith(), &CostFunction::Sin).expect("problem");
            let di = max_directivity_complex(&p).expect("design").directivity_index_db;
            worst = worst.max((di - 10.0 * (((n + 1) * (n + 1)) as f64).log10()).abs());
        }
    }
    g.check(
        "7 complex DI equals 10 log10 (N+1)^2",
        worst <= 1e-6,
        format!("N in {{2, 4, 10}}, max error {worst:.2e} dB, tolerance 1e-6"),
    );

    let rule = GaussLegendre::new(32);
    let mut orth = 0f64;
    for n in 0..=12usize {
        for m in 0..=12usize {
            // x = cos theta turns the sin theta d theta measure into dx on [-1, 1]
            let got = rule.integrate(|x| legendre_p(n, x).unwrap() * legendre_p(m, x).unwrap());
            let want = if n == m { 2.0 / (2 * n + 1) as f64 } else { 0.0 };
            orth = orth.max((got - want).abs());
        }
    }
    g.check(
        "7 Legendre orthogonality",
        orth <= 1e-10,
        format!("n, m <= 12, max error {orth:.2e}, tolerance 1e-10"),
    );

    let mut wr = 0f64;
    for n in 0..=15usize {
        for x in [0.5, 1.0, 5.0, 10.0] {
            let j = sph_bessel(BesselKind::J, n, x).unwrap();
            let y = sph_bessel(BesselKind::Y, n, x).unwrap();
            let jd = sph_bessel_deriv(BesselKind::J, n, x).unwrap();
            let yd = sph_bessel_deriv(BesselKind::Y, n, x).unwrap();
            wr = wr.max(((j * yd - jd * y) * x * x - 1.0).abs());
        }
    }
    g.check(
        "7 Bessel Wronskian",
        wr <= 1e-9,
        format!("n <= 15, x in {{0.5, 1, 5, 10}}, max relative error {wr:.2e}, tolerance 1e-9"),
    );
}

fn criterion_8(g: &mut Gate) {
    let start = Instant::now();
    let scenario = Scenario::bundled();
    let study = studies::pwd(&scenario, Beamformer::All, 0).expect("plane-wave decomposition");
    let elapsed = start.elapsed();
    let step = scenario.map_step_deg.to_radians();
    let source = study.source;
    let map = |b: Beamformer| &study.maps.iter().find(|m| m.0 == b).expect("map present").2;

    let complex = map(Beamformer::ComplexMd);
    let (pt, pp) = complex.peak.to_degrees();
    g.check(
        "8 complex peak at the source",
        within_one_cell(complex.peak, source, step),
        format!("peak ({pt:.1}, {pp:.1}) deg, source (100, 160), kr = {:.4}", study.kr),
    );

    let real = map(Beamformer::RealMd);
    match real.secondary {
        Some(s) => {
            let (t, p) = s.direction.to_degrees();
            g.check(
                "8 real secondary peak at the antipode",
                within_one_cell(s.direction, source.antipode(), step),
                format!("({t:.1}, {p:.1}) deg, antipode (80, 340)"),
            );
            g.check(
                "8 real secondary peak level",
                s.relative_db >= -3.0,
                format!("{:.3} dB relative, expected >= -3", s.relative_db),
            );
        }
        None => g.check("8 real secondary peak", false, "no secondary peak".into()),
    }

    let linear = map(Beamformer::RealLinear);
    let level = linear.secondary.map_or(f64::NEG_INFINITY, |s| s.relative_db);
    g.check(
        "8 linear-cost secondary peak",
        level <= -6.0,
        format!("{level:.3} dB relative, expected <= -6"),
    );
    g.runtime("8", elapsed, Duration::from_secs(10));
}

fn run_reproduce(target: &str, dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_realbeam"))
        .args(["--quiet", "--out"])
        .arg(dir)
        .args(["reproduce", target])
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("exit status {status}"))
    }
}

fn compare_runs(target: &str) -> Result<usize, String> {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_reproduce(target, a.path())?;
    run_reproduce(target, b.path())?;
    let fa = bundle_files(a.path()).map_err(|e| e.to_string())?;
    let fb = bundle_files(b.path()).map_err(|e| e.to_string())?;
    if fa != fb {
        return Err(format!("file sets differ: {fa:?} vs {fb:?}"));
    }
    if fa.is_empty() {
        return Err("no files written".into());
    }
    for f in &fa {
        let x = std::fs::read(a.path().join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.path().join(f)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{} differs", f.display()));
        }
    }
    Ok(fa.len())
}

fn criterion_9(g: &mut Gate) {
    for target in ["fig1", "fig2", "fig3", "fig4", "table1", "fig7", "all"] {
        match compare_runs(target) {
            Ok(n) => g.check(
                &format!("9 reproduce {target}"),
                true,
                format!("{n} files byte-identical across two runs"),
            ),
            Err(e) => g.check(&format!("9 reproduce {target}"), false, e),
        }
    }
}

fn main() {
    let mut g = Gate { results: Vec::new() };
    criterion_1(&mut g);
    criteria_2_and_3(&mut g);
    criterion_4(&mut g);
    criterion_5(&mut g);
    criterion_6(&mut g);
    criterion_7(&mut g);
    criterion_8(&mut g);
    criterion_9(&mut g);
    let failed: Vec<&str> = g.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!(
        "acceptance: {} passed, {} failed",
        g.results.len() - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        println!("failed: {}", failed.join("; "));
        std::process::exit(1);
    }
}
