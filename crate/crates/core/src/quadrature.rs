//! Fixed-node Gauss-Legendre quadrature with node doubling.
//!
//! Each refinement evaluates the rule with `N` and `2N` nodes; the difference
//! between the two is the error estimate. Integrands handled here are smooth
//! (polynomials, or singular integrands after an analytic substitution), so
//! the estimate is conservative once the rule has resolved the integrand.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Node budget and tolerance for [`integrate`].
///
/// Convergence is declared when `|I_2N - I_N| <= tolerance * max(1, |I_2N|)`,
/// i.e. the tolerance is absolute for results below one and relative above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            initial_nodes: 16,
            max_nodes: 2048,
            tolerance: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess for the i-th root, refined by Newton.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * z * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = next;
    }
    let d = n as f64 * (z * p - p_prev) / (z * z - 1.0);
    (p, d)
}

fn apply_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let sum: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&t, &w)| w * f(mid + half * t))
        .sum();
    half * sum
}

/// Integrates `f` over `[a, b]`, doubling the node count until the
/// estimate meets `config.tolerance` or the node budget runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, config: &QuadratureConfig) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            nodes: 0,
        });
    }
    let mut n = config.initial_nodes.max(1);
    let mut coarse = apply_rule(&f, a, b, n);
    let mut last_error = f64::INFINITY;
    while 2 * n <= config.max_nodes {
        let fine = apply_rule(&f, a, b, 2 * n);
        let error = (fine - coarse).abs();
        n *= 2;
        if !fine.is_finite() {
            break;
        }
        if error <= config.tolerance * fine.abs().max(1.0) {
            return Ok(Estimate {
                value: fine,
                error,
                nodes: n,
            });
        }
        coarse = fine;
        last_error = error;
    }
    Err(Error::NonConvergence {
        estimate: last_error,
        tolerance: config.tolerance,
        nodes: n,
    })
}
