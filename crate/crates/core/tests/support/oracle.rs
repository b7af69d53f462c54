//! Brute-force reference for the real-weight directivity maximum.
//!
//! Works on plain slices so it shares no numerics with the library. The
//! objective `|w^T b|^2 / (w^T A w)` is scale invariant, so the search runs
//! over unit vectors: dense random sampling, then shrinking random-step hill
//! climbing from the best few samples.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn real_directivity(a: &[Vec<f64>], b: &[Complex64], w: &[f64]) -> f64 {
    let m = w.len();
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for i in 0..m {
        num += b[i] * w[i];
        for j in 0..m {
            den += w[i] * a[i][j] * w[j];
        }
    }
    num.norm_sqr() / den
}

fn random_unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Maximum of the real-weight directivity for real symmetric `a`.
pub fn max_real_directivity(a: &[Vec<f64>], b: &[Complex64], seed: u64) -> f64 {
    let m = b.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<(f64, Vec<f64>)> = (0..20_000)
        .map(|_| {
            let w = random_unit(&mut rng, m);
            (real_directivity(a, b, &w), w)
        })
        .collect();
    samples.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut best = 0.0f64;
    for (mut value, mut w) in samples.into_iter().take(8) {
        let mut step = 0.2;
        while step > 1e-9 {
            let mut improved = false;
            for _ in 0..60 {
                let trial: Vec<f64> = w.iter().map(|x| x + step * rng.random_range(-1.0..1.0)).collect();
                let v = real_directivity(a, b, &trial);
                if v > value {
                    value = v;
                    w = trial;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(value);
    }
    best
}
