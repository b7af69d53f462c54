mod support;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realbeam::cmatrix::CostFunction;
use realbeam::design::{max_directivity_real, DesignProblem};
use realbeam::geometry::{ArrayModel, SphericalAngle};
use realbeam::SOUND_SPEED;
use support::oracle::max_real_directivity;

fn check(m: usize, d_over_lambda: f64, theta: f64, seed: u64) {
    let d = 0.05;
    let f = SOUND_SPEED * d_over_lambda / d;
    let model = ArrayModel::linear(m, d, f).unwrap();
    let p = DesignProblem::for_model(&model, SphericalAngle::new(theta, 0.0).unwrap(), &CostFunction::Sin).unwrap();
    let r = max_directivity_real(&p).unwrap();
    let c = p.c().real_part();
    let a: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| c[(i, j)]).collect()).collect();
    let b: Vec<_> = p.manifold().iter().copied().collect();
    let brute = max_real_directivity(&a, &b, seed);
    let rel = (r.directivity - brute).abs() / brute;
    assert!(rel < 1e-3, "M={m} d/l={d_over_lambda} theta={theta}: closed {} brute {brute}", r.directivity);
    // the closed form is optimal, so sampling can only approach it from below
    assert!(brute <= r.directivity * (1.0 + 1e-9));
}

#[test]
fn three_element_example() {
    check(3, 0.3, 1.0, 7);
}

#[test]
fn random_linear_arrays_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in 2..=4 {
        for k in 0..10 {
            let dl = rng.random_range(0.1..0.9);
            let theta = rng.random_range(0.05..PI - 0.05);
            check(m, dl, theta, 100 * m as u64 + k);
        }
    }
}
