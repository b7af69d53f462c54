//! Special functions for phase-mode processing.
//!
//! Spherical Bessel functions of the first kind use Miller's downward
//! recurrence whenever the order exceeds the argument, normalized against the
//! closed form of `j_0` (or `j_1` near a zero of `j_0`). The second kind uses
//! upward recurrence, which is stable for the dominant solution. Derivatives
//! come from `f_n'(x) = f_{n-1}(x) - (n+1)/x f_n(x)`.
//!
//! The spherical Hankel function is of the second kind, `h_n = j_n - i y_n`,
//! which matches an `e^{i omega t}` time convention.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const RESCALE_ABOVE: f64 = 1e200;

/// Legendre polynomial `P_n(x)` by three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    let x = x.clamp(-1.0, 1.0);
    Ok(legendre_unchecked(n, x))
}

/// `P_0(x) ..= P_n_max(x)`.
pub fn legendre_all(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_unit_interval(x)?;
    let x = x.clamp(-1.0, 1.0);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(x);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    Ok(out)
}

pub(crate) fn legendre_unchecked(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn check_unit_interval(x: f64) -> Result<()> {
    if !(x.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Orthonormal complex spherical harmonic `Y_n^m(theta, phi)` with the
/// Condon-Shortley phase.
pub fn sph_harmonic(n: usize, m: i64, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() as usize > n {
        return Err(Error::Index(format!("|m| = {} exceeds n = {n}", m.abs())));
    }
    let mabs = m.unsigned_abs() as usize;
    let plm = normalized_assoc_legendre(n, mabs, theta.cos(), theta.sin());
    let y = Complex64::from_polar(plm, mabs as f64 * phi);
    if m >= 0 {
        Ok(y)
    } else if mabs.is_multiple_of(2) {
        Ok(y.conj())
    } else {
        Ok(-y.conj())
    }
}

/// All `Y_n^m` for `n <= n_max`, ordered by the linear index `n^2 + n + m`.
pub fn sph_harmonics_all(n_max: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let (x, s) = (theta.cos(), theta.sin());
    let mut out = vec![Complex64::new(0.0, 0.0); (n_max + 1) * (n_max + 1)];
    let table = normalized_assoc_legendre_table(n_max, x, s);
    for m in 0..=n_max {
        let e = Complex64::from_polar(1.0, m as f64 * phi);
        for n in m..=n_max {
            let y = e * table[n * (n_max + 1) + m];
            out[sh_index(n, m as i64)] = y;
            if m > 0 {
                let neg = if m % 2 == 0 { y.conj() } else { -y.conj() };
                out[sh_index(n, -(m as i64))] = neg;
            }
        }
    }
    out
}

/// Linear index of `(n, m)` in order-major storage.
pub fn sh_index(n: usize, m: i64) -> usize {
    ((n * n + n) as i64 + m) as usize
}

// sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m(x), Condon-Shortley phase included.
fn normalized_assoc_legendre(n: usize, m: usize, x: f64, s: f64) -> f64 {
    let mut pmm = (0.25 / PI).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    if n == m {
        return pmm;
    }
    let mf = m as f64;
    let mut p_prev = pmm;
    let mut p_curr = (2.0 * mf + 3.0).sqrt() * x * pmm;
    for l in (m + 2)..=n {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let a_prev = ((4.0 * (lf - 1.0) * (lf - 1.0) - 1.0) / ((lf - 1.0) * (lf - 1.0) - mf * mf)).sqrt();
        let next = a * (x * p_curr - p_prev / a_prev);
        p_prev = p_curr;
        p_curr = next;
    }
    p_curr
}

fn normalized_assoc_legendre_table(n_max: usize, x: f64, s: f64) -> Vec<f64> {
    let stride = n_max + 1;
    let mut t = vec![0.0; stride * stride];
    for m in 0..=n_max {
        for n in m..=n_max {
            t[n * stride + m] = normalized_assoc_legendre(n, m, x, s);
        }
    }
    t
}

/// Kind selector for the real spherical Bessel functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    /// First kind, `j_n`.
    J,
    /// Second kind, `y_n`.
    Y,
}

/// `j_n(x)` or `y_n(x)`.
pub fn sph_bessel(kind: BesselKind, n: usize, x: f64) -> Result<f64> {
    match kind {
        BesselKind::J => {
            if x == 0.0 {
                return Ok(if n == 0 { 1.0 } else { 0.0 });
            }
            check_positive(x)?;
            Ok(sph_bessel_j_all(n, x)[n])
        }
        BesselKind::Y => {
            check_positive(x)?;
            Ok(sph_bessel_y_all(n, x)[n])
        }
    }
}

/// Derivative of `j_n` or `y_n` with respect to the argument.
pub fn sph_bessel_deriv(kind: BesselKind, n: usize, x: f64) -> Result<f64> {
    if kind == BesselKind::J && x == 0.0 {
        return Ok(if n == 1 { 1.0 / 3.0 } else { 0.0 });
    }
    check_positive(x)?;
    let f = match kind {
        BesselKind::J => sph_bessel_j_all(n + 1, x),
        BesselKind::Y => sph_bessel_y_all(n + 1, x),
    };
    Ok(derivative_from_values(&f, n, x))
}

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("spherical Bessel argument must be positive, got {x}")));
    }
    Ok(())
}

fn derivative_from_values(f: &[f64], n: usize, x: f64) -> f64 {
    if n == 0 {
        -f[1]
    } else {
        f[n - 1] - (n as f64 + 1.0) / x * f[n]
    }
}

/// `j_0(x) ..= j_n_max(x)` for `x > 0`.
pub fn sph_bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if x >= n_max as f64 + 1.0 {
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(j0);
        if n_max >= 1 {
            out.push(s / (x * x) - c / x);
        }
        for k in 1..n_max {
            let next = (2.0 * k as f64 + 1.0) / x * out[k] - out[k - 1];
            out.push(next);
        }
        return out;
    }

    // Miller: f_{k-1} = (2k+1)/x f_k - f_{k+1}, seeded far above n_max.
    let start = 2 * (n_max.max(x.ceil() as usize)) + 30;
    let mut f = vec![0.0; start + 2];
    f[start] = 1e-150;
    for k in (1..=start).rev() {
        f[k - 1] = (2.0 * k as f64 + 1.0) / x * f[k] - f[k + 1];
        if f[k - 1].abs() > RESCALE_ABOVE {
            for v in f[k - 1..].iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    // j_1 only wins the comparison away from x -> 0, where this form is accurate
    let j1 = s / (x * x) - c / x;
    let scale = if j0.abs() >= j1.abs() { j0 / f[0] } else { j1 / f[1] };
    f.truncate(n_max + 1);
    for v in f.iter_mut() {
        *v *= scale;
    }
    f
}

/// `y_0(x) ..= y_n_max(x)` for `x > 0`. Orders whose magnitude exceeds the
/// floating-point range come back as `-inf`.
pub fn sph_bessel_y_all(n_max: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(-c / x);
    if n_max >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for k in 1..n_max {
        let next = (2.0 * k as f64 + 1.0) / x * out[k] - out[k - 1];
        out.push(if next.is_finite() { next } else { f64::NEG_INFINITY });
    }
    out
}

/// Mode strength of a unit plane wave scattered by a rigid sphere,
/// `b_n(kr) = 4 pi i^n (j_n - j_n'/h_n' h_n)`.
pub fn mode_strength(n: usize, kr: f64) -> Result<Complex64> {
    Ok(ModeStrengthSpectrum::new(n, kr)?.values[n])
}

/// Mode strengths `b_0 ..= b_N` at a single `kr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeStrengthSpectrum {
    pub order_max: usize,
    pub kr: f64,
    pub values: Vec<Complex64>,
}

impl ModeStrengthSpectrum {
    pub fn new(order_max: usize, kr: f64) -> Result<Self> {
        check_positive(kr)?;
        let j = sph_bessel_j_all(order_max + 1, kr);
        let y = sph_bessel_y_all(order_max + 1, kr);
        let mut values = Vec::with_capacity(order_max + 1);
        let mut i_pow = Complex64::new(1.0, 0.0);
        for n in 0..=order_max {
            let jd = derivative_from_values(&j, n, kr);
            let yd = derivative_from_values(&y, n, kr);
            let h = Complex64::new(j[n], -y[n]);
            let hd = Complex64::new(jd, -yd);
            if hd.norm() == 0.0 {
                return Err(Error::Numeric(format!("h_{n}'({kr}) is zero")));
            }
            // h/h' stays moderate where h and h' individually overflow; the
            // fallback is its small-argument limit
            let ratio = if hd.is_finite() && h.is_finite() {
                h / hd
            } else {
                Complex64::new(-kr / (n as f64 + 1.0), 0.0)
            };
            let b = 4.0 * PI * i_pow * (Complex64::new(j[n], 0.0) - jd * ratio);
            if !b.is_finite() {
                return Err(Error::Numeric(format!("mode strength b_{n}({kr}) is not finite")));
            }
            values.push(b);
            i_pow *= Complex64::new(0.0, 1.0);
        }
        Ok(Self { order_max, kr, values })
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|b| b.norm()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussLegendre;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre_p(3, 1.0).unwrap(), 1.0);
        // explicit P_3(x) = (5x^3 - 3x)/2
        let x: f64 = 0.5;
        let explicit = 0.5 * (5.0 * x.powi(3) - 3.0 * x);
        assert!((explicit + 0.4375).abs() < 1e-15);
        assert!((legendre_p(3, 0.5).unwrap() - explicit).abs() < 1e-15);
    }

    #[test]
    fn legendre_endpoints_exact() {
        for n in 0..40 {
            assert_eq!(legendre_p(n, 1.0).unwrap(), 1.0);
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(legendre_p(n, -1.0).unwrap(), want);
        }
    }

    #[test]
    fn legendre_domain_error() {
        assert!(legendre_p(2, 1.0 + 1e-9).is_err());
        assert!(legendre_p(2, 1.0 + 1e-13).is_ok());
        assert!(legendre_p(2, f64::NAN).is_err());
    }

    #[test]
    fn legendre_all_matches_single() {
        let v = legendre_all(12, -0.37).unwrap();
        for (n, p) in v.iter().enumerate() {
            assert_eq!(*p, legendre_p(n, -0.37).unwrap());
        }
    }

    #[test]
    fn legendre_orthogonality() {
        let rule = GaussLegendre::on_interval(40, 0.0, PI);
        for n in 0..=12 {
            for m in 0..=12 {
                let got = rule.integrate(|t| {
                    legendre_unchecked(n, t.cos()) * legendre_unchecked(m, t.cos()) * t.sin()
                });
                let want = if n == m { 2.0 / (2.0 * n as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-10, "n={n} m={m} got={got}");
            }
        }
    }

    #[test]
    fn harmonic_examples() {
        let y00 = sph_harmonic(0, 0, 1.234, 5.0).unwrap();
        assert!((y00.re - 0.282_094_791_773_878_1).abs() < 1e-15 && y00.im == 0.0);
        let y10 = sph_harmonic(1, 0, 0.0, 0.0).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!((y10.re - 0.488_602_5).abs() < 1e-7);
    }

    #[test]
    fn harmonic_explicit_low_order() {
        // Y_2^1 = -sqrt(15/(8 pi)) sin cos e^{i phi}
        let (t, p): (f64, f64) = (0.7, 2.1);
        let want = Complex64::from_polar(-(15.0 / (8.0 * PI)).sqrt() * t.sin() * t.cos(), p);
        let got = sph_harmonic(2, 1, t, p).unwrap();
        assert!((got - want).norm() < 1e-14);
        // Y_1^1 = -sqrt(3/(8 pi)) sin e^{i phi}
        let want = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * t.sin(), p);
        assert!((sph_harmonic(1, 1, t, p).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn harmonic_addition_theorem() {
        let n = 4;
        let s: f64 = (-4..=4)
            .map(|m| sph_harmonic(n, m, 1.1, 2.3).unwrap().norm_sqr())
            .sum();
        assert!((s - 9.0 / (4.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn harmonic_conjugation_exact() {
        for n in 0..8usize {
            for m in 1..=n as i64 {
                let pos = sph_harmonic(n, m, 0.9, 4.0).unwrap();
                let neg = sph_harmonic(n, -m, 0.9, 4.0).unwrap();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(neg, pos.conj() * sign);
            }
        }
    }

    #[test]
    fn harmonic_index_error() {
        assert!(matches!(sph_harmonic(2, 3, 0.1, 0.1), Err(Error::Index(_))));
        assert!(matches!(sph_harmonic(2, -3, 0.1, 0.1), Err(Error::Index(_))));
    }

    #[test]
    fn harmonics_all_matches_single() {
        let all = sph_harmonics_all(6, 0.4, 5.5);
        for n in 0..=6usize {
            for m in -(n as i64)..=(n as i64) {
                assert_eq!(all[sh_index(n, m)], sph_harmonic(n, m, 0.4, 5.5).unwrap());
            }
        }
    }

    #[test]
    fn harmonic_orthonormality_by_quadrature() {
        let rule = GaussLegendre::new(12);
        let nphi = 16;
        let mut gram = vec![Complex64::new(0.0, 0.0); 25 * 25];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            for k in 0..nphi {
                let phi = 2.0 * PI * k as f64 / nphi as f64;
                let y = sph_harmonics_all(4, x.acos(), phi);
                for a in 0..25 {
                    for b in 0..25 {
                        gram[a * 25 + b] += y[a] * y[b].conj() * (w * 2.0 * PI / nphi as f64);
                    }
                }
            }
        }
        for a in 0..25 {
            for b in 0..25 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * 25 + b] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bessel_closed_forms() {
        let x = 1.0f64;
        assert!((sph_bessel(BesselKind::J, 0, x).unwrap() - x.sin() / x).abs() < 1e-15);
        assert!((sph_bessel(BesselKind::J, 1, x).unwrap() - (x.sin() - x.cos())).abs() < 1e-15);
        assert!((sph_bessel(BesselKind::Y, 0, x).unwrap() + x.cos()).abs() < 1e-15);
        assert!((sph_bessel(BesselKind::J, 0, 1.0).unwrap() - 0.841_471_0).abs() < 1e-7);
        assert!((sph_bessel(BesselKind::J, 1, 1.0).unwrap() - 0.301_168_7).abs() < 1e-7);
        assert!((sph_bessel(BesselKind::Y, 0, 1.0).unwrap() + 0.540_302_3).abs() < 1e-7);
    }

    #[test]
    fn bessel_j2_closed_form_across_regimes() {
        for &x in &[1e-3f64, 0.3, 1.0, 2.5, 3.0, 7.0, 20.0] {
            let (s, c) = (x.sin(), x.cos());
            let want = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            let got = sph_bessel(BesselKind::J, 2, x).unwrap();
            // closed form loses digits to cancellation at small x; compare
            // against the series there
            let want = if x < 0.1 { x * x / 15.0 * (1.0 - x * x / 14.0) } else { want };
            assert!(rel(got, want) < 1e-10, "x={x} got={got} want={want}");
        }
    }

    #[test]
    fn bessel_small_argument_series() {
        // j_n(x) ~ x^n / (2n+1)!!
        let x = 1e-6f64;
        let mut dfact = 1.0;
        for n in 0..=15usize {
            if n > 0 {
                dfact *= 2.0 * n as f64 + 1.0;
            }
            let got = sph_bessel(BesselKind::J, n, x).unwrap();
            let want = x.powi(n as i32) / dfact;
            assert!(rel(got, want) < 1e-9, "n={n} got={got:e} want={want:e}");
        }
    }

    #[test]
    fn bessel_at_zero_and_domain() {
        assert_eq!(sph_bessel(BesselKind::J, 0, 0.0).unwrap(), 1.0);
        assert_eq!(sph_bessel(BesselKind::J, 3, 0.0).unwrap(), 0.0);
        assert!(sph_bessel(BesselKind::Y, 0, 0.0).is_err());
        assert!(sph_bessel(BesselKind::J, 0, -1.0).is_err());
        assert!(sph_bessel_deriv(BesselKind::Y, 2, -0.5).is_err());
        assert_eq!(sph_bessel_deriv(BesselKind::J, 1, 0.0).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn bessel_near_zero_of_j0() {
        // j_0(pi) = 0 forces the j_1 normalization branch
        let got = sph_bessel(BesselKind::J, 1, PI).unwrap();
        assert!(rel(got, 1.0 / PI) < 1e-13);
        let got = sph_bessel(BesselKind::J, 4, PI).unwrap();
        let up = sph_bessel_j_upward_reference(4, PI);
        assert!(rel(got, up) < 1e-11);
    }

    fn sph_bessel_j_upward_reference(n: usize, x: f64) -> f64 {
        let mut a = x.sin() / x;
        let mut b = x.sin() / (x * x) - x.cos() / x;
        for k in 1..n {
            let c = (2.0 * k as f64 + 1.0) / x * b - a;
            a = b;
            b = c;
        }
        if n == 0 { a } else { b }
    }

    #[test]
    fn wronskian() {
        for n in 0..=15 {
            for &x in &[0.5, 1.0, 5.0, 10.0] {
                let j = sph_bessel(BesselKind::J, n, x).unwrap();
                let y = sph_bessel(BesselKind::Y, n, x).unwrap();
                let jd = sph_bessel_deriv(BesselKind::J, n, x).unwrap();
                let yd = sph_bessel_deriv(BesselKind::Y, n, x).unwrap();
                let w = j * yd - jd * y;
                assert!(rel(w, 1.0 / (x * x)) < 1e-9, "n={n} x={x} w={w}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for n in 0..6 {
            for &x in &[0.7, 3.3, 9.1] {
                for kind in [BesselKind::J, BesselKind::Y] {
                    let fd = (sph_bessel(kind, n, x + h).unwrap() - sph_bessel(kind, n, x - h).unwrap())
                        / (2.0 * h);
                    let d = sph_bessel_deriv(kind, n, x).unwrap();
                    assert!((fd - d).abs() < 1e-7 * d.abs().max(1.0), "{kind:?} n={n} x={x}");
                }
            }
        }
    }

    // b_n = 4 pi i^(n-1) / (x^2 h_n'(x)), from the Wronskian j y' - j' y = 1/x^2
    fn mode_strength_wronskian_form(n: usize, x: f64) -> Complex64 {
        let jd = sph_bessel_deriv(BesselKind::J, n, x).unwrap();
        let yd = sph_bessel_deriv(BesselKind::Y, n, x).unwrap();
        let hd = Complex64::new(jd, -yd);
        let i_pow = Complex64::new(0.0, 1.0).powi(n as i32 - 1);
        4.0 * PI * i_pow / (x * x * hd)
    }

    #[test]
    fn mode_strength_matches_wronskian_form() {
        for n in 0..=12 {
            for &kr in &[0.1, 1.0, 3.96, 10.0, 25.0] {
                let a = mode_strength(n, kr).unwrap();
                let b = mode_strength_wronskian_form(n, kr);
                assert!((a - b).norm() <= 1e-9 * b.norm(), "n={n} kr={kr}");
            }
        }
    }

    #[test]
    fn mode_strength_low_kr_limit() {
        let b0 = mode_strength(0, 1e-6).unwrap();
        assert!(rel(b0.norm(), 4.0 * PI) < 1e-3);
        assert!((b0.norm() - 12.566).abs() < 1e-2);
    }

    #[test]
    fn mode_strength_high_order_decay() {
        let r = mode_strength(12, 4.0).unwrap().norm() / mode_strength(4, 4.0).unwrap().norm();
        assert!(r < 1e-3, "ratio {r}");
    }

    #[test]
    fn mode_strength_flat_near_kr_equals_order() {
        let spec = ModeStrengthSpectrum::new(10, 10.0).unwrap();
        let mags = spec.magnitudes();
        let max = mags.iter().cloned().fold(0.0, f64::max);
        let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 4.0, "spread {}", max / min);
    }

    #[test]
    fn mode_strength_finite_over_grid() {
        let mut kr = 1e-3;
        while kr <= 30.0 {
            let spec = ModeStrengthSpectrum::new(15, kr).unwrap();
            assert_eq!(spec.values.len(), 16);
            assert!(spec.values.iter().all(|b| b.is_finite()), "kr={kr}");
            kr *= 1.3;
        }
        let tiny = ModeStrengthSpectrum::new(15, 1e-6).unwrap();
        assert!(tiny.values.iter().all(|b| b.is_finite()));
    }

    #[test]
    fn mode_strength_monotone_decay_beyond_kr() {
        for &kr in &[0.5, 2.0, 4.0, 7.5] {
            let mags = ModeStrengthSpectrum::new(20, kr).unwrap().magnitudes();
            let start = kr.ceil() as usize + 1;
            for n in start..20 {
                assert!(mags[n + 1] < mags[n], "kr={kr} n={n}");
            }
        }
    }

    #[test]
    fn reference_values_from_independent_library() {
        // frozen from scipy.special
        let cases = [
            (0, 1.0, 8.681_937_637_828_856, 1.892_298_618_496_967_5),
            (5, 3.96, 0.090_504_567_488_943_02, 1.247_365_326_396_110_6),
            (10, 10.0, -1.424_807_545_613_505, 0.535_146_560_621_105_1),
        ];
        for (n, kr, re, im) in cases {
            let b = mode_strength(n, kr).unwrap();
            assert!((b - Complex64::new(re, im)).norm() < 1e-11, "n={n} kr={kr} b={b}");
        }
        let b = mode_strength(10, 1.0).unwrap();
        assert!(rel(b.re, -1.707_648_321_512_22e-9) < 1e-9);
        assert!(rel(sph_bessel(BesselKind::J, 15, 0.5).unwrap(), 1.584_282_443_125_972_6e-22) < 1e-12);
        assert!(rel(sph_bessel(BesselKind::Y, 15, 0.5).unwrap(), -4.074_391_127_343_705_6e20) < 1e-12);
        assert!(rel(sph_bessel(BesselKind::J, 7, 12.3).unwrap(), -0.044_061_991_618_581_85) < 1e-12);
    }

    #[test]
    fn mode_strength_domain() {
        assert!(mode_strength(0, 0.0).is_err());
        assert!(mode_strength(0, -2.0).is_err());
    }
}
