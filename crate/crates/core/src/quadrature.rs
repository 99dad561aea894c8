//! Gauss–Legendre quadrature on finite intervals.

use crate::{Error, Result};
use std::f64::consts::PI;

/// Order used for the Kantorovich cell integrals unless configured otherwise.
pub const DEFAULT_ORDER: usize = 5;

/// An `order`-point Gauss–Legendre rule on `[-1, 1]`, exact for polynomials
/// of degree `2 * order - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n_f = n as f64;
    let dp = n_f * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "quadrature order must be at least 1".into(),
            ));
        }
        if order == 1 {
            return Ok(Self {
                nodes: vec![0.0],
                weights: vec![2.0],
            });
        }
        let n = order as f64;
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        // Roots are symmetric; solve for the upper half by Newton's method
        // from the Chebyshev-like initial guess.
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `[lo, hi]`, short-circuiting the first error
    /// returned by `f`.
    pub fn try_integrate<F>(&self, lo: f64, hi: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.try_integrate(lo, hi, |t| Ok(f(t)))
            .expect("infallible integrand")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn five_point_rule_matches_tabulated_values() {
        let rule = GaussLegendre::new(5).unwrap();
        let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
        let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
        let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
        let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
        let expected_nodes = [-b, -a, 0.0, a, b];
        let expected_weights = [wb, wa, 128.0 / 225.0, wa, wb];
        for i in 0..5 {
            assert_relative_eq!(rule.nodes()[i], expected_nodes[i], epsilon = 1e-15);
            assert_relative_eq!(rule.weights()[i], expected_weights[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn exact_for_degree_up_to_two_order_minus_one() {
        for order in 1..=12 {
            let rule = GaussLegendre::new(order).unwrap();
            for deg in 0..(2 * order) as i32 {
                let got = rule.integrate(0.0, 2.0, |t| t.powi(deg));
                let exact = 2.0f64.powi(deg + 1) / f64::from(deg + 1);
                assert_relative_eq!(got, exact, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for order in [2, 3, 7, 20, 64] {
            let rule = GaussLegendre::new(order).unwrap();
            assert_relative_eq!(rule.weights().iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn transcendental_integrand() {
        let rule = GaussLegendre::new(5).unwrap();
        let got = rule.integrate(0.0, 0.1, |t| (-t).exp());
        assert_relative_eq!(got, 1.0 - (-0.1f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(GaussLegendre::new(0).is_err());
    }
}
