//! Adaptive composite Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a fixed Gauss-Legendre rule and compared with
//! the sum over its two halves. Panels whose discrepancy exceeds their share of
//! the absolute tolerance are bisected.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const RULE_POINTS: usize = 10;

#[derive(Debug)]
struct Rule {
    nodes: [f64; RULE_POINTS],
    weights: [f64; RULE_POINTS],
}

/// Gauss-Legendre nodes and weights on [-1, 1], found by Newton iteration on
/// the Legendre polynomial.
fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = RULE_POINTS;
        let mut nodes = [0.0; RULE_POINTS];
        let mut weights = [0.0; RULE_POINTS];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

/// P_n(x) and P_n'(x).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    r.nodes
        .iter()
        .zip(r.weights.iter())
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Settings for [`AdaptiveQuadrature::integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveQuadrature {
    /// Absolute tolerance on the whole interval.
    pub tolerance: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Number of equal panels the interval is cut into before adapting.
    pub initial_panels: usize,
}

impl Default for AdaptiveQuadrature {
    fn default() -> Self {
        AdaptiveQuadrature {
            tolerance: 1e-8,
            max_depth: 30,
            initial_panels: 16,
        }
    }
}

impl AdaptiveQuadrature {
    pub fn with_tolerance(tolerance: f64) -> Self {
        AdaptiveQuadrature {
            tolerance,
            ..Default::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::Domain(format!(
                "invalid integration bounds [{a}, {b}]"
            )));
        }
        let width = b - a;
        let initial = self.initial_panels.max(1);
        let step = width / initial as f64;

        let mut stack: Vec<(f64, f64, f64, u32)> = (0..initial)
            .rev()
            .map(|i| {
                let lo = a + step * i as f64;
                let hi = if i + 1 == initial { b } else { lo + step };
                (lo, hi, gauss_legendre(&f, lo, hi), 0)
            })
            .collect();

        let mut value = 0.0;
        let mut error = 0.0;
        let mut panels = 0;
        while let Some((lo, hi, whole, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = gauss_legendre(&f, lo, mid);
            let right = gauss_legendre(&f, mid, hi);
            let refined = left + right;
            let diff = (whole - refined).abs();
            let allowed = self.tolerance * (hi - lo) / width;
            if !refined.is_finite() {
                return Err(Error::Domain(format!(
                    "integrand not finite on [{lo}, {hi}]"
                )));
            }
            if diff <= allowed || depth >= self.max_depth {
                value += refined;
                error += diff;
                panels += 1;
            } else {
                stack.push((mid, hi, right, depth + 1));
                stack.push((lo, mid, left, depth + 1));
            }
        }

        if error > self.tolerance {
            return Err(Error::NoConvergence {
                estimate: error,
                tolerance: self.tolerance,
            });
        }
        Ok(Integral {
            value,
            error_estimate: error,
            panels,
        })
    }
}
