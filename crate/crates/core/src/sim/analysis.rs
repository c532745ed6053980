use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{simulate, InitialCondition, SimConfig, SimGeometry, SimResult};
use crate::asymptotics::{mfpt_circular, mfpt_elliptic, mfpt_sphere_two_term, MediumSpec, WindowEllipse};
use crate::collins::{solve_b0, CollinsConfig};
use crate::error::{ensure_domain, Error, Result};

/// Column order of the CSV form of [`SimRecord`].
pub const RECORD_COLUMNS: [&str; 9] = [
    "geometry",
    "params",
    "mean",
    "stderr",
    "n_absorbed",
    "n_censored",
    "dt",
    "seed",
    "elapsed_s",
];

/// Flat, serializable summary of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub geometry: String,
    pub params: BTreeMap<String, f64>,
    pub mean: f64,
    pub stderr: f64,
    pub n_absorbed: usize,
    pub n_censored: usize,
    pub dt: f64,
    pub seed: u64,
    pub elapsed_s: f64,
}

impl SimRecord {
    pub fn new(cfg: &SimConfig, result: &SimResult) -> Self {
        let mut params: BTreeMap<String, f64> = cfg
            .geometry
            .params()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        params.insert("D".into(), cfg.diffusion);
        params.insert("n_paths".into(), cfg.n_paths as f64);
        params.insert("max_steps".into(), cfg.max_steps as f64);
        if let InitialCondition::Fixed(p) = cfg.initial {
            params.insert("x0".into(), p[0]);
            params.insert("y0".into(), p[1]);
            params.insert("z0".into(), p[2]);
        }
        Self {
            geometry: cfg.geometry.name().to_string(),
            params,
            mean: result.mean,
            stderr: result.stderr,
            n_absorbed: result.n_absorbed,
            n_censored: result.n_censored,
            dt: result.dt_used,
            seed: cfg.seed,
            elapsed_s: result.elapsed,
        }
    }

    /// `params` flattened as `key=value` pairs joined by `;`.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Cells in [`RECORD_COLUMNS`] order.
    pub fn csv_cells(&self) -> [String; 9] {
        [
            self.geometry.clone(),
            self.params_string(),
            self.mean.to_string(),
            self.stderr.to_string(),
            self.n_absorbed.to_string(),
            self.n_censored.to_string(),
            self.dt.to_string(),
            self.seed.to_string(),
            self.elapsed_s.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub dt: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n_censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub levels: Vec<SweepLevel>,
    /// Intercept of the weighted fit `mean ≈ m₀ + c √dt`.
    pub extrapolated: f64,
    pub extrapolated_stderr: f64,
    pub slope: f64,
}

/// Run `cfg` at each time step in `dt_levels` and extrapolate to `dt → 0`
/// assuming a bias linear in `√dt`.
pub fn convergence_sweep(cfg: &SimConfig, dt_levels: &[f64]) -> Result<SweepReport> {
    ensure_domain!(cfg.n_paths > 0, "n_paths must be positive");
    ensure_domain!(dt_levels.len() >= 3, "need at least 3 dt levels, got {}", dt_levels.len());
    ensure_domain!(dt_levels.iter().all(|&d| d > 0.0), "dt levels must be positive");
    let ratio = dt_levels[1] / dt_levels[0];
    ensure_domain!(
        ratio != 1.0 && dt_levels.windows(2).all(|w| ((w[1] / w[0]) / ratio - 1.0).abs() < 1e-2),
        "dt levels must be geometrically spaced"
    );
    let mut levels = Vec::with_capacity(dt_levels.len());
    for &dt in dt_levels {
        let r = simulate(&cfg.clone().with_dt(dt))?;
        if r.n_absorbed < 2 {
            return Err(Error::Solver(format!("too few absorbed paths at dt = {dt}")));
        }
        levels.push(SweepLevel {
            dt,
            mean: r.mean,
            stderr: r.stderr,
            n_censored: r.n_censored,
        });
    }
    // weighted least squares on [1, √dt]
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for l in &levels {
        let w = 1.0 / (l.stderr * l.stderr).max(1e-300);
        let x = l.dt.sqrt();
        s0 += w;
        s1 += w * x;
        s2 += w * x * x;
        t0 += w * l.mean;
        t1 += w * x * l.mean;
    }
    let det = s0 * s2 - s1 * s1;
    let extrapolated = (s2 * t0 - s1 * t1) / det;
    let slope = (s0 * t1 - s1 * t0) / det;
    Ok(SweepReport {
        levels,
        extrapolated,
        extrapolated_stderr: (s2 / det).sqrt(),
        slope,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub label: String,
    pub value: f64,
    /// `(mc − value) / value`
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryComparison {
    pub mc: SimResult,
    pub rows: Vec<TheoryRow>,
}

impl TheoryComparison {
    pub fn row(&self, label: &str) -> Option<&TheoryRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Closed-form and solver predictions for the quantity `cfg` estimates.
pub fn theory_rows(cfg: &SimConfig) -> Result<Vec<(String, f64)>> {
    let d = cfg.diffusion;
    let mut rows = Vec::new();
    match (cfg.geometry, cfg.initial) {
        (SimGeometry::BallWithCap { radius, eps }, init) => {
            if eps == 0.0 {
                return Err(Error::Unsupported("closed ball has no finite MFPT".into()));
            }
            let a = radius * eps.sin();
            let medium = MediumSpec::new(cfg.geometry.volume(), d)?;
            rows.push(("leading".to_string(), mfpt_circular(&medium, a)?.value));
            rows.push(("two-term".to_string(), mfpt_sphere_two_term(radius, a, d)?.value));
            // b₀ is the mean over the ball minus R²/15 and the centre value minus R²/6
            let shift = match init {
                InitialCondition::Uniform => Some(radius * radius / 15.0),
                InitialCondition::Fixed(p) if p.iter().all(|c| c.abs() < 1e-12) => Some(radius * radius / 6.0),
                InitialCondition::Fixed(_) => None,
            };
            if let Some(shift) = shift {
                let b0 = solve_b0(&CollinsConfig::new(radius, eps))?;
                rows.push(("collins".to_string(), (b0.b0 + shift) / d));
            }
        }
        (SimGeometry::CylinderAxial { length, .. }, init) => {
            let exact = match init {
                InitialCondition::Uniform => length * length / 3.0,
                InitialCondition::Fixed(p) => length * p[2] - p[2] * p[2] / 2.0,
            };
            rows.push(("exact".to_string(), exact / d));
        }
        (SimGeometry::BoxWithEllipticWindow { a, b, .. }, _) => {
            let medium = MediumSpec::new(cfg.geometry.volume(), d)?;
            let win = WindowEllipse::new(a.max(b), a.min(b))?;
            rows.push(("leading".to_string(), mfpt_elliptic(&medium, &win)?.value));
        }
    }
    Ok(rows)
}

/// Simulate `cfg` and tabulate the relative gap to every applicable theory.
pub fn compare_with_theory(cfg: &SimConfig) -> Result<TheoryComparison> {
    let rows = theory_rows(cfg)?;
    let mc = simulate(cfg)?;
    let rows = rows
        .into_iter()
        .map(|(label, value)| TheoryRow {
            rel_gap: (mc.mean - value) / value,
            label,
            value,
        })
        .collect();
    Ok(TheoryComparison { mc, rows })
}
