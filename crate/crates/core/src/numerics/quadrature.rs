use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::special::legendre_with_derivative;
use crate::error::{ensure_domain, Result};

/// Nodes and positive weights of a fixed quadrature rule on `interval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Same rule mapped affinely onto `[a, b]`.
    pub fn rescaled(&self, a: f64, b: f64) -> QuadratureRule {
        let (lo, hi) = self.interval;
        let scale = (b - a) / (hi - lo);
        QuadratureRule {
            nodes: self.nodes.iter().map(|&x| a + (x - lo) * scale).collect(),
            weights: self.weights.iter().map(|&w| w * scale).collect(),
            interval: (a, b),
        }
    }
}

/// `n`-point Gauss–Legendre rule on `[a, b]`, exact for polynomials of
/// degree `2n − 1`.
///
/// Nodes are found by Newton iteration on `Pₙ` from the Tricomi initial
/// guesses; the rule is symmetrised so that it is exactly symmetric about
/// the midpoint.
pub fn gauss_rule(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    ensure_domain!(n >= 1, "gauss rule needs at least one node");
    ensure_domain!(a < b, "gauss rule needs a < b, got [{a}, {b}]");
    let nf = n as f64;
    let mut x_ref = vec![0.0; n];
    let mut w_ref = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x_ref sorted increasingly: largest root sits at the end.
        x_ref[n - 1 - i] = x;
        x_ref[i] = -x;
        w_ref[n - 1 - i] = w;
        w_ref[i] = w;
    }
    if n % 2 == 1 {
        x_ref[n / 2] = 0.0;
    }
    let reference = QuadratureRule {
        nodes: x_ref,
        weights: w_ref,
        interval: (-1.0, 1.0),
    };
    Ok(reference.rescaled(a, b))
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `n` points each.
pub fn composite_gauss(n: usize, panels: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    ensure_domain!(panels >= 1, "composite rule needs at least one panel");
    let base = gauss_rule(n, -1.0, 1.0)?;
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(n * panels);
    let mut weights = Vec::with_capacity(n * panels);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let r = base.rescaled(lo, lo + h);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        interval: (a, b),
    })
}

/// Double-exponential (tanh–sinh) quadrature of `f` over `[a, b]`.
///
/// Tolerates integrable algebraic and logarithmic singularities at either
/// endpoint; `f` is never evaluated exactly at an endpoint. The step is
/// halved until two successive estimates agree to `tol` (relative to the
/// magnitude of the integral) or the level cap is reached.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -tanh_sinh(f, b, a, tol);
    }
    let half = 0.5 * (b - a);
    // Abscissa offsets are computed from the nearer endpoint to keep
    // resolution where singularities live.
    let eval = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let cosh_s = s.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cosh_s * cosh_s);
        // distance of the node from its nearest endpoint, in units of `half`
        let delta = 1.0 / (s.abs().exp() * cosh_s);
        let dist = half * delta;
        let x = if s >= 0.0 { b - dist } else { a + dist };
        if x <= a || x >= b || w == 0.0 {
            return 0.0;
        }
        let fx = f(x);
        if fx.is_finite() {
            w * fx
        } else {
            0.0
        }
    };
    const T_MAX: f64 = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut t = h;
    while t <= T_MAX {
        sum += eval(t) + eval(-t);
        t += h;
    }
    let mut estimate = half * h * sum;
    for _ in 0..10 {
        h *= 0.5;
        let mut t = h;
        let mut added = 0.0;
        while t <= T_MAX {
            added += eval(t) + eval(-t);
            t += 2.0 * h;
        }
        sum += added;
        let next = half * h * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * estimate.abs().max(1e-300) || diff < 1e-300 {
            break;
        }
    }
    estimate
}
