//! The Abel-type transform pair on a spherical cap `[0, ε]`:
//!
//! ```text
//! H(u) = (1/2π) ∫_u^ε h(α) sin α dα / √(cos u − cos α)
//! h(θ) = −(2/sin θ) d/dθ ∫_θ^ε H(u) sin u du / √(cos θ − cos u)
//! ```
//!
//! Both integrals carry an inverse square root at the lower endpoint. The
//! forward transform substitutes `cos u − cos α = t²`, which turns it into
//! a smooth integral in `t`. The inverse substitutes
//! `cos u = cos θ cos²φ + cos ε sin²φ`, which factors the inner integral as
//! `2·T(θ)·Q(θ)` with `T(θ) = √(cos θ − cos ε)` and `Q` smooth on `(0, ε)`;
//! `T` is differentiated in closed form and only the smooth factor `Q` is
//! differentiated numerically.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_rule, QuadratureRule};
use crate::error::{ensure_domain, Result};

/// Default number of Gauss points used along the regularized variable.
pub const DEFAULT_ORDER: usize = 64;

/// `√(cos x − cos y)` for `x ≤ y`, evaluated without cancellation.
pub(crate) fn sqrt_cos_gap(x: f64, y: f64) -> f64 {
    (2.0 * (0.5 * (y - x)).sin() * (0.5 * (y + x)).sin())
        .max(0.0)
        .sqrt()
}

/// Transform evaluator with a fixed quadrature order.
#[derive(Debug, Clone)]
pub struct AbelTransform {
    eps: f64,
    rule: QuadratureRule,
    angle_rule: QuadratureRule,
}

impl AbelTransform {
    pub fn new(eps: f64, order: usize) -> Result<Self> {
        ensure_domain!(eps > 0.0 && eps < PI, "cap angle {eps} outside (0, π)");
        Ok(Self {
            eps,
            rule: gauss_rule(order, 0.0, 1.0)?,
            angle_rule: gauss_rule(order, 0.0, FRAC_PI_2)?,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `H(u)` from `h`; zero at `u = ε`.
    pub fn forward<F: Fn(f64) -> f64>(&self, h: F, u: f64) -> Result<f64> {
        ensure_domain!(
            (0.0..=self.eps).contains(&u),
            "forward Abel point {u} outside [0, {}]",
            self.eps
        );
        let top = sqrt_cos_gap(u, self.eps);
        if top == 0.0 {
            return Ok(0.0);
        }
        let su = (0.5 * u).sin();
        // cos u − cos α = t²  ⇔  sin²(α/2) = sin²(u/2) + t²/2, and sin α dα = 2t dt
        let integral = self.rule.integrate(|s| {
            let t = top * s;
            let alpha = 2.0 * (su * su + 0.5 * t * t).sqrt().min(1.0).asin();
            h(alpha)
        });
        Ok(top * integral / PI)
    }

    /// Smooth factor `Q(θ) = ∫₀^{π/2} H(u(θ, φ)) cos φ dφ`.
    fn smooth_factor<F: Fn(f64) -> f64>(&self, big_h: &F, theta: f64) -> f64 {
        let st = (0.5 * theta).sin();
        let se = (0.5 * self.eps).sin();
        self.angle_rule.integrate(|phi| {
            let (s, c) = phi.sin_cos();
            let half = (st * st * c * c + se * se * s * s).sqrt().min(1.0);
            big_h(2.0 * half.asin()) * c
        })
    }

    /// `h(θ)` from `H`, for `θ` strictly inside `(0, ε)`.
    pub fn invert<F: Fn(f64) -> f64>(&self, big_h: F, theta: f64) -> Result<f64> {
        ensure_domain!(
            theta > 0.0 && theta < self.eps,
            "inverse Abel point {theta} outside (0, {})",
            self.eps
        );
        // F(θ) = 2 T Q,  T' = −sin θ / (2T)  ⇒  h = 2Q/T − 4 T Q' / sin θ
        let t = sqrt_cos_gap(theta, self.eps);
        let q = self.smooth_factor(&big_h, theta);
        let step = 0.1 * theta.min(self.eps - theta);
        let dq = ridders_derivative(|x| self.smooth_factor(&big_h, x), theta, step);
        Ok(2.0 * q / t - 4.0 * t * dq / theta.sin())
    }
}

/// Ridders' extrapolated central difference.
pub(crate) fn ridders_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64) -> f64 {
    const NTAB: usize = 8;
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    let mut table = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    table[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut best = table[0][0];
    let mut err = f64::MAX;
    for i in 1..NTAB {
        h /= CON;
        table[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = CON2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// Forward transform with the default order.
pub fn abel_forward<F: Fn(f64) -> f64>(h: F, eps: f64, u: f64) -> Result<f64> {
    ensure_domain!(u <= eps, "forward Abel point {u} beyond cap angle {eps}");
    AbelTransform::new(eps, DEFAULT_ORDER)?.forward(h, u)
}

/// Inverse transform with the default order.
pub fn abel_invert<F: Fn(f64) -> f64>(big_h: F, eps: f64, theta: f64) -> Result<f64> {
    AbelTransform::new(eps, DEFAULT_ORDER)?.invert(big_h, theta)
}

/// Tabulated transform pair of one function `h` on the cap.
///
/// `forward` holds `H(uᵢ)` on `u_grid ⊂ [0, ε]`; `inverse` holds the
/// inversion of that `H` on `theta_grid ⊂ (0, ε)`, which reproduces `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelPair {
    pub epsilon: f64,
    pub u_grid: Vec<f64>,
    pub forward: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub inverse: Vec<f64>,
}

impl AbelPair {
    /// Tabulate on `n` equispaced points (the `θ` grid excludes both ends).
    pub fn tabulate<F: Fn(f64) -> f64>(h: F, eps: f64, n: usize) -> Result<Self> {
        ensure_domain!(n >= 2, "need at least two grid points");
        let tr = AbelTransform::new(eps, DEFAULT_ORDER)?;
        let u_grid: Vec<f64> = (0..n).map(|i| eps * i as f64 / (n - 1) as f64).collect();
        let forward = u_grid
            .iter()
            .map(|&u| tr.forward(&h, u))
            .collect::<Result<Vec<_>>>()?;
        let theta_grid: Vec<f64> = (1..=n).map(|i| eps * i as f64 / (n + 1) as f64).collect();
        let big_h = |u: f64| tr.forward(&h, u.min(eps)).unwrap_or(0.0);
        let inverse = theta_grid
            .iter()
            .map(|&t| tr.invert(big_h, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            epsilon: eps,
            u_grid,
            forward,
            theta_grid,
            inverse,
        })
    }
}
