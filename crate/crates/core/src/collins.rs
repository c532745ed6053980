//! Collins-method solution of the mixed boundary value problem on a ball of
//! radius `R` whose boundary is absorbing on the polar cap `θ < ε` and
//! reflecting elsewhere.
//!
//! The dual Legendre series for the MFPT reduce to a Fredholm equation of the
//! second kind on `[0, ε]`,
//!
//! ```text
//! J(u) + ∫₀^ε K(u,v) J(v) dv = M(u),
//! ```
//!
//! whose kernel has a logarithmic diagonal singularity. Because the free term
//! `M` is proportional to the unknown constant `c = 2R²/3 + b₀`, the equation
//! is solved for `Ĵ = J/c`, and `b₀` then follows from one scalar relation:
//!
//! ```text
//! c·(1 − κ) = (2R²/3)·π/(ε + sin ε),   κ = √2π/(ε + sin ε) ∫₀^ε Ĵ(u) cos(u/2) du.
//! ```
//!
//! The MFPT from the centre of the ball is `b₀ + R²/6`.

use std::f64::consts::{PI, SQRT_2};

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Error, Result};
use crate::numerics::abel::AbelTransform;
use crate::numerics::{gauss_rule, tanh_sinh};

const INV_2PI: f64 = 0.5 / PI;
const RHS_TOL: f64 = 1e-13;

/// Largest cap angle for which the corrected `b₀` is reported as in range.
pub const VALIDATED_EPS: f64 = 0.2;

/// Kernel `K(u, v)` in closed form.
///
/// The last term uses `|v − u|` so that the expression is symmetric, like the
/// series that defines it. On the diagonal the kernel is `+∞` (integrable
/// logarithmic singularity).
pub fn kernel_closed(u: f64, v: f64) -> f64 {
    if u == v {
        return f64::INFINITY;
    }
    let s = 0.5 * (u + v);
    let d = 0.5 * (v - u).abs();
    -s.cos() * INV_2PI * (2.0 * s.sin().abs()).ln() - d.cos() * INV_2PI * (2.0 * d.sin()).ln()
        + (u + v - PI) / (4.0 * PI) * s.sin()
        + (2.0 * d - PI) / (4.0 * PI) * d.sin()
}

/// Truncated defining series `(2/π) Σ_{n=1}^{N} (1/2n) cos((n+½)u) cos((n+½)v)`.
pub fn kernel_series(u: f64, v: f64, terms: usize) -> Result<f64> {
    ensure_domain!(
        (0.0..=PI).contains(&u) && (0.0..=PI).contains(&v),
        "kernel arguments ({u}, {v}) outside [0, π]"
    );
    if u == v {
        return Err(Error::Diagonal(u));
    }
    let mut sum = 0.0;
    for n in 1..=terms {
        let k = n as f64 + 0.5;
        sum += (k * u).cos() * (k * v).cos() / (2.0 * n as f64);
    }
    Ok(2.0 / PI * sum)
}

/// `K(u,v) + log|u − v| / 2π`, continuous across the diagonal.
fn kernel_regular(u: f64, v: f64) -> f64 {
    if u == v {
        -u.cos() * INV_2PI * (2.0 * u.sin()).ln() + (2.0 * u - PI) / (4.0 * PI) * u.sin()
    } else {
        kernel_closed(u, v) + INV_2PI * (u - v).abs().ln()
    }
}

/// `∫₀^ε −log|u − v| / 2π dv`.
fn log_part_integral(u: f64, eps: f64) -> f64 {
    let xlogx = |x: f64| if x > 0.0 { x * x.ln() - x } else { 0.0 };
    -INV_2PI * (xlogx(u) + xlogx(eps - u))
}

/// `G(ψ, φ) = (c/π)(√2 cos(ψ/2) − √(cos ψ − cos φ))` for `ψ < φ`.
pub fn g_function(psi: f64, phi: f64, c: f64) -> Result<f64> {
    ensure_domain!(
        psi >= 0.0 && psi < phi && phi <= PI,
        "g_function needs 0 <= psi < phi <= π, got psi={psi}, phi={phi}"
    );
    let gap = crate::numerics::abel::sqrt_cos_gap(psi, phi);
    Ok(c / PI * (SQRT_2 * (0.5 * psi).cos() - gap))
}

/// `(2R²/3)·(π/(ε + sin ε) − 1)`: `b₀` with the kernel dropped.
pub fn b0_leading(radius: f64, eps: f64) -> Result<f64> {
    ensure_domain!(eps > 0.0 && eps <= PI, "cap angle {eps} outside (0, π]");
    ensure_domain!(radius > 0.0, "ball radius must be positive, got {radius}");
    Ok(2.0 * radius * radius / 3.0 * (PI / (eps + eps.sin()) - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    #[default]
    Full,
    /// Kernel replaced by zero; reproduces the leading-order problem.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollinsConfig {
    pub radius: f64,
    pub eps: f64,
    pub n_quad: usize,
    /// Truncation used when the kernel series is requested as an oracle.
    pub n_series: usize,
    pub kernel: KernelMode,
}

impl CollinsConfig {
    pub fn new(radius: f64, eps: f64) -> Self {
        Self {
            radius,
            eps,
            n_quad: 64,
            n_series: 100_000,
            kernel: KernelMode::Full,
        }
    }

    pub fn with_quadrature(mut self, n_quad: usize) -> Self {
        self.n_quad = n_quad;
        self
    }

    pub fn with_kernel(mut self, kernel: KernelMode) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_domain!(self.radius > 0.0, "ball radius must be positive, got {}", self.radius);
        ensure_domain!(
            self.eps > 0.0 && self.eps < PI,
            "cap angle {} outside (0, π)",
            self.eps
        );
        ensure_domain!(self.n_quad >= 8, "n_quad must be at least 8, got {}", self.n_quad);
        ensure_domain!(
            self.n_series >= 100,
            "n_series must be at least 100, got {}",
            self.n_series
        );
        Ok(())
    }

    fn kernel(&self, u: f64, v: f64) -> f64 {
        match self.kernel {
            KernelMode::Full => kernel_closed(u, v),
            KernelMode::Zero => 0.0,
        }
    }
}

/// Discretized normalized Fredholm system and its solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollinsSystem {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    /// `K(uᵢ, uⱼ)`; diagonal entries carry the singularity correction divided by `wᵢ`.
    pub kernel_matrix: Vec<Vec<f64>>,
    /// `M̂(uᵢ) = (√2/π) ∫₀^ε K(uᵢ, v) cos(v/2) dv`
    pub rhs: Vec<f64>,
    pub j_hat: Vec<f64>,
    pub c_factor: f64,
    /// `‖(I + K)Ĵ − M̂‖∞` of the discrete system
    pub residual: f64,
}

impl CollinsSystem {
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.kernel_matrix[i][j] - self.kernel_matrix[j][i]).abs());
            }
        }
        worst
    }
}

/// `∫₀^ε K(u, v) cos(v/2) dv`, split at the singular point `v = u`.
pub fn kernel_cos_moment(u: f64, eps: f64) -> f64 {
    let f = |v: f64| kernel_closed(u, v) * (0.5 * v).cos();
    tanh_sinh(f, 0.0, u, RHS_TOL) + tanh_sinh(f, u, eps, RHS_TOL)
}

/// Nyström matrix `A` with `(I + A)Ĵ ≈ (I + K)Ĵ`, by singularity subtraction of
/// `−log|u − v| / 2π` on every row.
fn nystrom_matrix(cfg: &CollinsConfig, nodes: &[f64], weights: &[f64]) -> DMatrix<f64> {
    let n = nodes.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    if cfg.kernel == KernelMode::Zero {
        return a;
    }
    for i in 0..n {
        let ui = nodes[i];
        let mut discrete_log = 0.0;
        for j in 0..n {
            if i != j {
                a[(i, j)] = weights[j] * cfg.kernel(ui, nodes[j]);
                discrete_log -= weights[j] * INV_2PI * (ui - nodes[j]).abs().ln();
            }
        }
        a[(i, i)] =
            weights[i] * kernel_regular(ui, ui) + log_part_integral(ui, cfg.eps) - discrete_log;
    }
    a
}

fn gauss_nodes(cfg: &CollinsConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = gauss_rule(cfg.n_quad, 0.0, cfg.eps)?;
    Ok((rule.nodes, rule.weights))
}

/// Assemble and solve `(I + K)Ĵ = M̂` on the Gauss nodes of `[0, ε]`.
pub fn assemble_system(cfg: &CollinsConfig) -> Result<CollinsSystem> {
    cfg.validate()?;
    let (nodes, weights) = gauss_nodes(cfg)?;
    let n = nodes.len();
    let a = nystrom_matrix(cfg, &nodes, &weights);
    let rhs: Vec<f64> = match cfg.kernel {
        KernelMode::Zero => vec![0.0; n],
        KernelMode::Full => nodes
            .iter()
            .map(|&u| SQRT_2 / PI * kernel_cos_moment(u, cfg.eps))
            .collect(),
    };
    let system = DMatrix::<f64>::identity(n, n) + &a;
    let b = DVector::from_column_slice(&rhs);
    let lu = system.clone().lu();
    let j = lu
        .solve(&b)
        .ok_or_else(|| Error::Solver("singular Nyström matrix".into()))?;
    let residual = (&system * &j - &b).amax();
    if residual > 1e-10 * b.amax().max(1.0) {
        return Err(Error::Solver(format!("Nyström residual {residual:.3e} too large")));
    }
    let eps = cfg.eps;
    let moment: f64 = nodes
        .iter()
        .zip(&weights)
        .zip(j.iter())
        .map(|((&u, &w), &jv)| w * jv * (0.5 * u).cos())
        .sum();
    let c_factor = SQRT_2 * PI / (eps + eps.sin()) * moment;
    let kernel_matrix = (0..n)
        .map(|i| (0..n).map(|k| a[(i, k)] / weights[k]).collect())
        .collect();
    Ok(CollinsSystem {
        grid: nodes,
        weights,
        kernel_matrix,
        rhs,
        j_hat: j.iter().copied().collect(),
        c_factor,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B0Result {
    pub b0: f64,
    pub leading: f64,
    /// `1/(1 − κ)`: factor multiplying the leading value of `2R²/3 + b₀`
    pub correction_factor: f64,
    pub c_factor: f64,
    /// MFPT from the centre, `b₀ + R²/6`
    pub mfpt_center: f64,
    /// Set when `ε` exceeds the range in which the result has been validated.
    pub extrapolated: bool,
}

impl B0Result {
    /// `(b₀·4a/|Ω| − 1)` with `a = Rε`: relative size of the correction to the
    /// leading-order `πR²/(3ε)`.
    pub fn relative_correction(&self, radius: f64, eps: f64) -> f64 {
        self.b0 * 3.0 * eps / (PI * radius * radius) - 1.0
    }
}

pub fn solve_b0(cfg: &CollinsConfig) -> Result<B0Result> {
    let sys = assemble_system(cfg)?;
    b0_from_system(cfg, &sys)
}

pub fn b0_from_system(cfg: &CollinsConfig, sys: &CollinsSystem) -> Result<B0Result> {
    let kappa = sys.c_factor;
    if kappa >= 1.0 {
        return Err(Error::IllPosed(format!(
            "correction factor {kappa} >= 1 at eps = {}",
            cfg.eps
        )));
    }
    let r2 = cfg.radius * cfg.radius;
    let eps = cfg.eps;
    let b0 = 2.0 * r2 / 3.0 * (PI / ((eps + eps.sin()) * (1.0 - kappa)) - 1.0);
    let extrapolated = eps > VALIDATED_EPS;
    if extrapolated {
        warn!("cap angle {eps} beyond the validated range eps <= {VALIDATED_EPS}");
    }
    Ok(B0Result {
        b0,
        leading: b0_leading(cfg.radius, eps)?,
        correction_factor: 1.0 / (1.0 - kappa),
        c_factor: kappa,
        mfpt_center: b0 + r2 / 6.0,
        extrapolated,
    })
}

/// Discrete `L²[0, ε]` operator norm of `K`: the largest singular value of
/// `W^{1/2} K W^{1/2}`.
pub fn operator_norm(cfg: &CollinsConfig) -> Result<f64> {
    cfg.validate()?;
    let (nodes, weights) = gauss_nodes(cfg)?;
    let a = nystrom_matrix(cfg, &nodes, &weights);
    let n = nodes.len();
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let b = DMatrix::from_fn(n, n, |i, j| sqrt_w[i] * a[(i, j)] / sqrt_w[j]);
    let sv = b.singular_values();
    Ok(sv.iter().fold(0.0f64, |m, &s| m.max(s)))
}

/// `(√30/2π)·ε·log(1/ε)`
pub fn norm_bound(eps: f64) -> f64 {
    30f64.sqrt() / (2.0 * PI) * eps * (1.0 / eps).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleIntegralReport {
    pub eps: f64,
    pub integral: f64,
    /// `(1/π) ε² log(1/ε)`
    pub reference: f64,
    pub ratio: f64,
}

/// `∫₀^ε∫₀^ε K(u,v) cos(u/2) cos(v/2) du dv` against its leading asymptote.
pub fn double_integral_check(eps: f64) -> Result<DoubleIntegralReport> {
    ensure_domain!(eps > 0.0 && eps < 0.5, "double integral check needs 0 < eps < 0.5");
    let integral = tanh_sinh(
        |u| (0.5 * u).cos() * kernel_cos_moment(u, eps),
        0.0,
        eps,
        1e-11,
    );
    let reference = eps * eps * (1.0 / eps).ln() / PI;
    Ok(DoubleIntegralReport {
        eps,
        integral,
        reference,
        ratio: integral / reference,
    })
}

/// Leading-order cap density `h(θ)` recovered by Abel inversion of
/// `H(u) = −G(u, ε)` with `c = 2R²/3 + b₀` at leading order.
pub fn leading_order_h(radius: f64, eps: f64, theta: f64) -> Result<f64> {
    let c = 2.0 * radius * radius / 3.0 + b0_leading(radius, eps)?;
    let tr = AbelTransform::new(eps, 64)?;
    let big_h = |u: f64| {
        let gap = crate::numerics::abel::sqrt_cos_gap(u.min(eps), eps);
        -c / PI * (SQRT_2 * (0.5 * u).cos() - gap)
    };
    tr.invert(big_h, theta)
}
