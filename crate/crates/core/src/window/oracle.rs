use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Result};
use crate::numerics::{elliptic_k, gauss_rule};

/// Exact leading-order flux density through the elliptic window:
/// `g₀(x, y) = (|Ω|/(2π D a b)) / √(1 − x²/a² − y²/b²)`.
pub fn elliptic_flux_oracle(a: f64, b: f64, volume: f64, diffusion: f64, x: f64, y: f64) -> Result<f64> {
    ensure_domain!(b > 0.0 && b <= a, "ellipse needs 0 < b <= a, got a={a}, b={b}");
    let q = (x / a).powi(2) + (y / b).powi(2);
    ensure_domain!(q < 1.0, "point ({x}, {y}) is not inside the window");
    Ok(volume / (2.0 * PI * diffusion * a * b) / (1.0 - q).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    /// `|Ω| K(e) / (2π D a)`
    pub expected: f64,
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    pub max_rel_deviation: f64,
}

/// Single-layer potential of the oracle flux, `(1/2π) ∫ g₀(x)/|x − y| dS`,
/// at interior points `y` on a spiral of `n_check` points.
///
/// Each evaluation uses polar coordinates centred at `y`, which cancels the
/// `1/|x − y|` singularity, and the substitution `r = r_max(1 − s²)` along
/// each ray, which cancels the inverse square root at the rim. `order` is the
/// number of nodes per direction (trapezoid in angle, Gauss in `s`).
pub fn verify_constant_potential(
    a: f64,
    b: f64,
    volume: f64,
    diffusion: f64,
    n_check: usize,
    order: usize,
) -> Result<PotentialReport> {
    ensure_domain!(b > 0.0 && b <= a, "ellipse needs 0 < b <= a, got a={a}, b={b}");
    ensure_domain!(n_check >= 1 && order >= 2, "need n_check >= 1 and order >= 2");
    let e = (1.0 - (b / a).powi(2)).sqrt();
    let expected = volume * elliptic_k(e)? / (2.0 * PI * diffusion * a);
    let g_center = volume / (2.0 * PI * diffusion * a * b);
    let s_rule = gauss_rule(order, 0.0, 1.0)?;
    let n_phi = 2 * order;
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut points = Vec::with_capacity(n_check);
    let mut values = Vec::with_capacity(n_check);
    for k in 0..n_check {
        // spiral over 0..0.9 of the normalized radius
        let t = 0.9 * ((k as f64 + 0.5) / n_check as f64).sqrt();
        let ang = golden * k as f64;
        let y = [a * t * ang.cos(), b * t * ang.sin()];
        let (ia, ib) = (1.0 / (a * a), 1.0 / (b * b));
        let c = y[0] * y[0] * ia + y[1] * y[1] * ib - 1.0;
        let mut total = 0.0;
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let (ex, ey) = (phi.cos(), phi.sin());
            let qa = ex * ex * ia + ey * ey * ib;
            let qb = y[0] * ex * ia + y[1] * ey * ib;
            let disc = (qb * qb - qa * c).sqrt();
            let r_max = (-qb + disc) / qa;
            let r_min = (-qb - disc) / qa;
            // 1 − q(y + r e) = qa (r_max − r)(r − r_min)
            let ray = s_rule.integrate(|s| {
                let r = r_max * (1.0 - s * s);
                2.0 * r_max.sqrt() / (qa * (r - r_min)).sqrt()
            });
            total += ray;
        }
        let potential = g_center * total * (2.0 * PI / n_phi as f64) / (2.0 * PI);
        points.push(y);
        values.push(potential);
    }
    let max_rel_deviation = values
        .iter()
        .map(|v| ((v - expected) / expected).abs())
        .fold(0.0, f64::max);
    Ok(PotentialReport {
        expected,
        points,
        values,
        max_rel_deviation,
    })
}
