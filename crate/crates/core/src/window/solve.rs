use std::f64::consts::PI;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{Element, PlanarWindowMesh};
use crate::error::{ensure_domain, Error, Result};
use crate::numerics::linalg::gmres;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxSolution {
    /// Flux density per element, normalized so that `Σ g·area = |Ω|/D`.
    pub g: Vec<f64>,
    /// Leading-order MFPT.
    pub c0: f64,
    pub total_flux: f64,
    pub iterations: usize,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Pairs closer than this many element radii use the exact polygon
    /// integral instead of the centroid rule.
    pub near_field: f64,
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            near_field: 4.0,
            tol: 1e-12,
            restart: 200,
            max_iter: 2000,
        }
    }
}

/// `∫_P dA / |x − y|` over a simple polygon `P` (either orientation).
///
/// Each edge contributes the triangle it spans with `y`:
/// `±d·[asinh(s₂/d) − asinh(s₁/d)]`, with `d` the distance from `y` to the
/// edge line and `s₁, s₂` the signed positions of the edge ends along it.
pub(crate) fn polygon_inverse_distance(poly: &[[f64; 2]], y: [f64; 2]) -> f64 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (ex, ey) = (q[0] - p[0], q[1] - p[1]);
        let len = ex.hypot(ey);
        if len == 0.0 {
            continue;
        }
        let (tx, ty) = (ex / len, ey / len);
        let (px, py) = (p[0] - y[0], p[1] - y[1]);
        // signed distance; positive when y lies to the left of the edge
        let cross = tx * py - ty * px;
        let d = cross.abs();
        if d < 1e-300 {
            continue;
        }
        let s1 = px * tx + py * ty;
        let s2 = s1 + len;
        total += cross.signum() * d * ((s2 / d).asinh() - (s1 / d).asinh());
    }
    total.abs()
}

fn influence(target: &Element, source: &Element, self_term: bool, near_field: f64) -> f64 {
    let y = target.centroid;
    if self_term {
        return match &source.boundary {
            Some(poly) => polygon_inverse_distance(poly, y),
            // equal-area disk seen from its centre
            None => 2.0 * (PI * source.area).sqrt(),
        };
    }
    let dist = (source.centroid[0] - y[0]).hypot(source.centroid[1] - y[1]);
    match &source.boundary {
        Some(poly) if dist < near_field * (source.radius() + target.radius()) => {
            // the polygon helper returns |∫|, valid because y lies outside
            polygon_inverse_distance(poly, y)
        }
        _ => source.area / dist,
    }
}

/// Collocation solve of the single-layer equation at element centroids,
/// closed by the compatibility condition `Σ g·area = |Ω|/D`.
pub fn solve_window_ie(
    mesh: &PlanarWindowMesh,
    volume: f64,
    diffusion: f64,
) -> Result<FluxSolution> {
    solve_window_ie_with(mesh, volume, diffusion, SolverOptions::default())
}

pub fn solve_window_ie_with(
    mesh: &PlanarWindowMesh,
    volume: f64,
    diffusion: f64,
    opts: SolverOptions,
) -> Result<FluxSolution> {
    ensure_domain!(!mesh.is_empty(), "empty window mesh");
    ensure_domain!(volume > 0.0, "volume must be positive, got {volume}");
    ensure_domain!(diffusion > 0.0, "diffusion must be positive, got {diffusion}");
    let n = mesh.len();
    if n < 64 {
        warn!("window mesh has only {n} elements; the rim singularity is under-resolved");
    }
    let rows: Vec<Vec<f64>> = mesh
        .elements
        .par_iter()
        .enumerate()
        .map(|(i, target)| {
            mesh.elements
                .iter()
                .enumerate()
                .map(|(j, source)| influence(target, source, i == j, opts.near_field))
                .collect()
        })
        .collect();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    drop(rows);
    // (1/2π) A g = C₀ 1  ⇒  g = 2π C₀ x with A x = 1
    let ones = DVector::from_element(n, 1.0);
    let (x, stats) = gmres(&a, &ones, opts.tol, opts.restart, opts.max_iter)?;
    let areas = DVector::from_iterator(n, mesh.elements.iter().map(|e| e.area));
    let weighted = areas.dot(&x);
    if !(weighted.is_finite() && weighted > 0.0) {
        return Err(Error::Solver(format!(
            "single-layer system produced non-positive total density {weighted}"
        )));
    }
    let target = volume / diffusion;
    let c0 = target / (2.0 * PI * weighted);
    let g: Vec<f64> = x.iter().map(|xi| 2.0 * PI * c0 * xi).collect();
    let total_flux = g.iter().zip(mesh.elements.iter()).map(|(g, e)| g * e.area).sum();
    Ok(FluxSolution {
        g,
        c0,
        total_flux,
        iterations: stats.iterations,
        relative_residual: stats.relative_residual,
    })
}
