//! Gauss-Legendre quadrature.
//!
//! Nodes are the roots of `P_n`, found by Newton iteration from the
//! Tricomi-style initial guess; weights follow from the derivative at the
//! root. An `n`-point rule integrates polynomials of degree `2n - 1` exactly.

use std::f64::consts::PI;

/// An `n`-point Gauss-Legendre rule mapped onto `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule on the reference interval `[-1, 1]`, nodes ascending.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // roots come out descending; store ascending and mirror
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Rule on `[a, b]`.
    pub fn on_interval(n: usize, a: f64, b: f64) -> Self {
        let reference = Self::new(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Self {
            nodes: reference.nodes.iter().map(|x| mid + half * x).collect(),
            weights: reference.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weighted sum of `f` over the nodes.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Concatenate rules on adjacent sub-intervals.
    pub fn composite(pieces: &[(f64, f64)], n_each: usize) -> Self {
        let mut nodes = Vec::with_capacity(pieces.len() * n_each);
        let mut weights = Vec::with_capacity(pieces.len() * n_each);
        for &(a, b) in pieces {
            if b <= a {
                continue;
            }
            let rule = Self::on_interval(n_each, a, b);
            nodes.extend(rule.nodes);
            weights.extend(rule.weights);
        }
        Self { nodes, weights }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 16, 64, 200] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let n = 6;
        let rule = GaussLegendre::new(n);
        for deg in 0..(2 * n) {
            let got = rule.integrate(|x| x.powi(deg as i32));
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "deg={deg}");
        }
    }

    #[test]
    fn nodes_are_ascending_and_symmetric() {
        let rule = GaussLegendre::new(9);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        for i in 0..9 {
            assert!((rule.nodes[i] + rule.nodes[8 - i]).abs() < 1e-15);
        }
        assert_eq!(rule.nodes[4], 0.0);
    }

    #[test]
    fn interval_mapping() {
        let rule = GaussLegendre::on_interval(20, 0.0, PI);
        let got = rule.integrate(f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_handles_kink() {
        let rule = GaussLegendre::composite(&[(-1.0, 0.3), (0.3, 1.0)], 8);
        let got = rule.integrate(|x| (x - 0.3).abs());
        let want = 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7;
        assert!((got - want).abs() < 1e-14);
    }
}
