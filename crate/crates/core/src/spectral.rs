//! Direct Legendre-series solver for the ball with a circular absorbing cap.
//!
//! With `v = u + (R² − r²)/6` and `u = Σ aₙ (r/R)ⁿ Pₙ(cos θ)`, the boundary
//! conditions become the dual series
//!
//! ```text
//! Σ aₙ Pₙ(cos θ)       = 0,      0 ≤ θ < ε
//! Σ n aₙ Pₙ(cos θ)     = R²/3,   ε < θ ≤ π
//! ```
//!
//! The flux condition is imposed in integrated form, `∫_θ^π (·) sin t dt`,
//! using `∫_{-1}^{x} Pₙ = (Pₙ₊₁ − Pₙ₋₁)/(2n+1)`. Pointwise, the flux series
//! of a truncated solution oscillates badly because of the edge singularity;
//! the integrated condition has the same smoothness as the Dirichlet one, and
//! the overdetermined collocation system is then solved in least squares.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Error, Result};
use crate::numerics::{gauss_rule, legendre_all};

/// Default truncation; see the convergence sweep in the tests.
pub const DEFAULT_TERMS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreSeriesSolution {
    pub radius: f64,
    pub eps: f64,
    pub coeffs: Vec<f64>,
    /// max |Σ aₙ Pₙ(cos θ)| on a sample grid of `[0, ε)`
    pub residual_dirichlet: f64,
    /// max deviation of the integrated flux condition on a sample grid of `[ε, π]`
    pub residual_neumann: f64,
    /// Ratio of extreme singular values of the collocation matrix.
    pub condition: f64,
}

/// Graded Chebyshev points on `[lo, hi]`, clustered at both ends.
fn chebyshev_points(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|k| {
            let s = 0.5 * (1.0 - (PI * (k as f64 + 0.5) / m as f64).cos());
            lo + (hi - lo) * s
        })
        .collect()
}

/// Row of the integrated flux condition at `x = cos θ`:
/// coefficients of `aₙ` in `Σ n aₙ (Pₙ₊₁(x) − Pₙ₋₁(x))/(2n+1)`.
fn integrated_flux_row(terms: usize, x: f64, row: &mut [f64]) {
    let p = legendre_all(terms + 1, x);
    row[0] = 0.0;
    for n in 1..=terms {
        let nf = n as f64;
        row[n] = nf * (p[n + 1] - p[n - 1]) / (2.0 * nf + 1.0);
    }
}

/// Least-squares collocation solve with `terms + 1` coefficients and
/// `collocation` rows split evenly between the two boundary pieces.
pub fn solve_dual_series(
    radius: f64,
    eps: f64,
    terms: usize,
    collocation: usize,
) -> Result<LegendreSeriesSolution> {
    ensure_domain!(radius > 0.0, "ball radius must be positive, got {radius}");
    ensure_domain!(eps > 0.0 && eps <= PI, "cap angle {eps} outside (0, π]");
    ensure_domain!(terms >= 16, "need at least 16 series terms, got {terms}");
    ensure_domain!(
        collocation >= 2 * terms,
        "need at least 2N collocation points, got {collocation} for N = {terms}"
    );
    let ncols = terms + 1;
    let (dirichlet_pts, flux_pts) = if eps >= PI {
        (chebyshev_points(0.0, PI, collocation), Vec::new())
    } else {
        let md = collocation / 2;
        (
            chebyshev_points(0.0, eps, md),
            chebyshev_points(eps, PI, collocation - md),
        )
    };
    let nrows = dirichlet_pts.len() + flux_pts.len();
    let mut a = DMatrix::<f64>::zeros(nrows, ncols);
    let mut b = DVector::<f64>::zeros(nrows);
    let flux = radius * radius / 3.0;
    let mut row = vec![0.0; ncols];
    for (i, &th) in dirichlet_pts.iter().enumerate() {
        let p = legendre_all(terms, th.cos());
        for n in 0..ncols {
            a[(i, n)] = p[n];
        }
    }
    let off = dirichlet_pts.len();
    for (i, &th) in flux_pts.iter().enumerate() {
        let x = th.cos();
        integrated_flux_row(terms, x, &mut row);
        for n in 0..ncols {
            a[(off + i, n)] = row[n];
        }
        b[off + i] = flux * (1.0 + x);
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin.is_nan() || smin <= 1e-13 * smax {
        return Err(Error::Solver(format!(
            "rank-deficient collocation matrix: singular values in [{smin:.3e}, {smax:.3e}]"
        )));
    }
    let coeffs = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Solver(e.to_string()))?;
    let coeffs: Vec<f64> = coeffs.iter().copied().collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Solver("non-finite series coefficients".into()));
    }
    let mut sol = LegendreSeriesSolution {
        radius,
        eps,
        coeffs,
        residual_dirichlet: 0.0,
        residual_neumann: 0.0,
        condition: smax / smin,
    };
    sol.residual_dirichlet = sol.dirichlet_residual(400);
    sol.residual_neumann = sol.integrated_flux_residual(400);
    Ok(sol)
}

impl LegendreSeriesSolution {
    pub fn terms(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn a0(&self) -> f64 {
        self.coeffs[0]
    }

    fn boundary_value(&self, theta: f64) -> f64 {
        let p = legendre_all(self.terms(), theta.cos());
        self.coeffs.iter().zip(&p).map(|(a, p)| a * p).sum()
    }

    fn dirichlet_residual(&self, samples: usize) -> f64 {
        if self.eps >= PI {
            return (0..samples)
                .map(|k| self.boundary_value(PI * k as f64 / samples as f64).abs())
                .fold(0.0, f64::max);
        }
        (0..samples)
            .map(|k| self.boundary_value(self.eps * k as f64 / samples as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Integrated flux `∫_θ^π ∂u/∂r|_{r=R} sin t dt · R` (so that the target is
    /// `R²/3·(1 + cos θ)`).
    pub fn integrated_flux(&self, theta: f64) -> f64 {
        let n = self.terms();
        let mut row = vec![0.0; n + 1];
        integrated_flux_row(n, theta.cos(), &mut row);
        self.coeffs.iter().zip(&row).map(|(a, r)| a * r).sum()
    }

    fn integrated_flux_residual(&self, samples: usize) -> f64 {
        if self.eps >= PI {
            return 0.0;
        }
        let target = self.radius * self.radius / 3.0;
        (0..=samples)
            .map(|k| {
                let th = self.eps + (PI - self.eps) * k as f64 / samples as f64;
                (self.integrated_flux(th) - target * (1.0 + th.cos())).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Radial derivative `∂u/∂r` at `r = R`, summed with Lanczos σ-factors.
    ///
    /// Only meaningful away from the cap edge and the pole `θ = π`.
    pub fn boundary_flux(&self, theta: f64) -> f64 {
        let n = self.terms();
        let p = legendre_all(n, theta.cos());
        let mut sum = 0.0;
        for (k, (a, pk)) in self.coeffs.iter().zip(&p).enumerate().take(n + 1).skip(1) {
            let z = PI * k as f64 / (n + 1) as f64;
            sum += k as f64 * a * pk * z.sin() / z;
        }
        sum / self.radius
    }
}

/// MFPT `v(r, θ) = Σ aₙ (r/R)ⁿ Pₙ(cos θ) + (R² − r²)/6`.
pub fn reconstruct_mfpt(sol: &LegendreSeriesSolution, r: f64, theta: f64) -> Result<f64> {
    ensure_domain!(
        (0.0..=sol.radius).contains(&r),
        "radius {r} outside [0, R = {}]",
        sol.radius
    );
    let rho = r / sol.radius;
    let p = legendre_all(sol.terms(), theta.cos());
    let mut pow = 1.0;
    let mut u = 0.0;
    for (a, p) in sol.coeffs.iter().zip(&p) {
        u += a * pow * p;
        pow *= rho;
    }
    Ok(u + (sol.radius * sol.radius - r * r) / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageMfpt {
    /// `a₀ + R²/15` from orthogonality of the Legendre polynomials
    pub analytic: f64,
    /// volume average of [`reconstruct_mfpt`] by tensor Gauss quadrature
    pub quadrature: f64,
    /// MFPT from the centre, `a₀ + R²/6`
    pub center: f64,
}

/// Volume-averaged MFPT for a uniformly distributed starting point.
pub fn average_mfpt(sol: &LegendreSeriesSolution) -> Result<AverageMfpt> {
    let n = sol.terms();
    let r2 = sol.radius * sol.radius;
    let analytic = sol.a0() + r2 / 15.0;
    // exact for r^{n+2} and Pₙ(x) up to n = N
    let order = n / 2 + 4;
    let r_rule = gauss_rule(order, 0.0, sol.radius)?;
    let x_rule = gauss_rule(order, -1.0, 1.0)?;
    let mut total = 0.0;
    for (&r, &wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
        for (&x, &wx) in x_rule.nodes.iter().zip(&x_rule.weights) {
            let v = reconstruct_mfpt(sol, r, x.clamp(-1.0, 1.0).acos())?;
            total += wr * wx * r * r * v;
        }
    }
    let volume = 4.0 * PI * sol.radius.powi(3) / 3.0;
    Ok(AverageMfpt {
        analytic,
        quadrature: 2.0 * PI * total / volume,
        center: sol.a0() + r2 / 6.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preconditions() {
        assert!(solve_dual_series(1.0, 0.2, 8, 32).is_err());
        assert!(solve_dual_series(1.0, 0.2, 32, 40).is_err());
        assert!(solve_dual_series(1.0, 0.0, 32, 128).is_err());
        let sol = solve_dual_series(1.0, 0.3, 32, 128).unwrap();
        assert!(reconstruct_mfpt(&sol, 1.1, 0.0).is_err());
    }

    #[test]
    fn centre_value_is_a0_plus_r2_over_6() {
        let sol = solve_dual_series(2.0, 0.3, 32, 128).unwrap();
        let v = reconstruct_mfpt(&sol, 0.0, 1.234).unwrap();
        assert!((v - (sol.a0() + 4.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn fully_absorbing_boundary_has_vanishing_a0() {
        let a0: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| solve_dual_series(1.0, PI, n, 4 * n).unwrap().a0().abs())
            .collect();
        assert!(a0.iter().all(|&a| a < 1e-10), "{a0:?}");
    }

    #[test]
    fn average_two_ways() {
        let sol = solve_dual_series(1.0, 0.3, 64, 256).unwrap();
        let avg = average_mfpt(&sol).unwrap();
        assert!((avg.analytic - avg.quadrature).abs() < 1e-8);
    }
}
