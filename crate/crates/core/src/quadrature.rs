//! Gauss–Legendre rules and an adaptive panel integrator.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Panel size used for moments of test functions.
pub const PANEL_NODES: usize = 64;
/// Absolute error target for moment quadrature.
pub const MOMENT_TOL: f64 = 1e-12;

const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("quadrature did not converge on [{a}, {b}]: achieved error estimate {achieved:e} (target {target:e})")]
pub struct QuadratureError {
    pub a: f64,
    pub b: f64,
    pub achieved: f64,
    pub target: f64,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared, lazily built rule.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection with an `nodes`-point panel rule; a panel is accepted
/// when the whole-panel and two-half-panel estimates agree to its share of
/// `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    nodes: usize,
) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussLegendre::cached(nodes);
    let whole = rule.integrate(f, a, b);
    let mut worst = 0.0f64;
    let value = recurse(f, &rule, a, b, whole, tol, 0, &mut worst);
    if worst > tol {
        return Err(QuadratureError {
            a,
            b,
            achieved: worst,
            target: tol,
        });
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(f, a, mid);
    let right = rule.integrate(f, mid, b);
    let err = (left + right - whole).abs();
    // rounding floor: nothing below a few ulps of the panel magnitude is resolvable
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if err <= tol.max(floor) {
        return left + right;
    }
    if depth >= MAX_DEPTH {
        *worst = worst.max(err);
        return left + right;
    }
    recurse(f, rule, a, mid, left, 0.5 * tol, depth + 1, worst)
        + recurse(f, rule, mid, b, right, 0.5 * tol, depth + 1, worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // exact for degree <= 15
        let v = rule.integrate(&|x: f64| x.powi(14), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_rules_are_consistent() {
        for n in [16, 64, 128] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn adaptive_handles_flat_endpoint_behaviour() {
        // exp(-1/(1-x^2)) has all derivatives vanishing at +-1
        let f = |x: f64| {
            if x.abs() >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - x * x)).exp()
            }
        };
        let a = adaptive(&f, -1.0, 1.0, 1e-13, 64).unwrap();
        let b = adaptive(&f, -1.0, 1.0, 1e-13, 128).unwrap();
        assert!((a - b).abs() < 1e-13);
        assert!((a - 0.443_993_816_168_079_4).abs() < 1e-12, "{a}");
    }

    #[test]
    fn adaptive_known_integral() {
        let v = adaptive(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 16).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }
}
