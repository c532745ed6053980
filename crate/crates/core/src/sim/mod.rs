//! Brownian dynamics estimates of the MFPT.
//!
//! Paths are advanced by Euler–Maruyama steps, reflected specularly at the
//! reflecting boundary and killed on the absorbing window. A step that stays
//! inside may still have touched the window in between; that event is drawn
//! from the Brownian-bridge crossing probability, which removes most of the
//! `O(√dt)` bias of naive endpoint checks.
//!
//! Work is split into fixed batches of [`BATCH_SIZE`] paths. Batch `k` draws
//! from the ChaCha8 stream `k` of the configured seed and the per-batch sums
//! are merged in batch order, so results do not depend on the thread count.

mod analysis;
mod geometry;

use std::time::Instant;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Result};

pub use analysis::{
    theory_rows,
    compare_with_theory, convergence_sweep, SimRecord, SweepLevel, SweepReport, TheoryComparison,
    TheoryRow, RECORD_COLUMNS,
};
pub use geometry::SimGeometry;
use geometry::Step;

pub const BATCH_SIZE: usize = 256;
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;
/// Censored fraction above which a result is flagged unreliable.
pub const CENSOR_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "point", rename_all = "kebab-case")]
pub enum InitialCondition {
    Fixed([f64; 3]),
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub geometry: SimGeometry,
    pub diffusion: f64,
    /// `None` selects [`SimGeometry::default_dt`].
    pub dt: Option<f64>,
    pub n_paths: usize,
    pub seed: u64,
    pub max_steps: u64,
    pub initial: InitialCondition,
}

impl SimConfig {
    pub fn new(geometry: SimGeometry, diffusion: f64, n_paths: usize, seed: u64) -> Self {
        Self {
            geometry,
            diffusion,
            dt: None,
            n_paths,
            seed,
            max_steps: DEFAULT_MAX_STEPS,
            initial: InitialCondition::Uniform,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn resolved_dt(&self) -> f64 {
        self.dt.unwrap_or_else(|| self.geometry.default_dt(self.diffusion))
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        ensure_domain!(self.diffusion > 0.0, "diffusion must be positive, got {}", self.diffusion);
        ensure_domain!(self.n_paths > 0, "n_paths must be positive");
        ensure_domain!(self.max_steps > 0, "max_steps must be positive");
        let dt = self.resolved_dt();
        ensure_domain!(dt > 0.0 && dt.is_finite(), "dt must be positive, got {dt}");
        if let InitialCondition::Fixed(p) = self.initial {
            ensure_domain!(self.geometry.contains(p), "start point {p:?} is outside the domain");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Mean absorption time over absorbed paths.
    pub mean: f64,
    /// Sample standard deviation over `√n_absorbed`.
    pub stderr: f64,
    pub n_absorbed: usize,
    /// Paths still alive after `max_steps`; excluded from the mean.
    pub n_censored: usize,
    pub dt_used: f64,
    /// Wall time in seconds.
    pub elapsed: f64,
    /// More than 1% of the paths were censored.
    pub unreliable: bool,
}

#[derive(Default)]
struct BatchSums {
    times: Vec<f64>,
    censored: usize,
}

fn run_batch(cfg: &SimConfig, batch: usize, paths: usize, dt: f64) -> BatchSums {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(batch as u64);
    let sigma2 = 2.0 * cfg.diffusion * dt;
    let sigma = sigma2.sqrt();
    let mut out = BatchSums {
        times: Vec::with_capacity(paths),
        censored: 0,
    };
    for _ in 0..paths {
        let mut x = match cfg.initial {
            InitialCondition::Fixed(p) => p,
            InitialCondition::Uniform => cfg.geometry.sample_uniform(&mut rng),
        };
        let mut absorbed = None;
        for k in 1..=cfg.max_steps {
            let dx: [f64; 3] = [
                sigma * rng.sample::<f64, _>(StandardNormal),
                sigma * rng.sample::<f64, _>(StandardNormal),
                sigma * rng.sample::<f64, _>(StandardNormal),
            ];
            if let Step::Absorbed = cfg.geometry.advance(&mut x, dx, sigma2, &mut rng) {
                absorbed = Some(k);
                break;
            }
        }
        match absorbed {
            // the hit happened somewhere inside step k
            Some(k) => out.times.push((k as f64 - 0.5) * dt),
            None => out.censored += 1,
        }
    }
    out
}

/// Run `cfg.n_paths` independent paths to absorption.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let dt = cfg.resolved_dt();
    let step = (2.0 * cfg.diffusion * dt).sqrt();
    if step > cfg.geometry.feature_size() / 10.0 * (1.0 + 1e-9) {
        warn!(
            "step length {step:.3e} exceeds a tenth of the smallest feature {:.3e}",
            cfg.geometry.feature_size()
        );
    }
    let start = Instant::now();
    let n_batches = cfg.n_paths.div_ceil(BATCH_SIZE);
    let batches: Vec<BatchSums> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let paths = BATCH_SIZE.min(cfg.n_paths - b * BATCH_SIZE);
            run_batch(cfg, b, paths, dt)
        })
        .collect();
    let n_censored: usize = batches.iter().map(|b| b.censored).sum();
    let n_absorbed: usize = batches.iter().map(|b| b.times.len()).sum();
    let (mean, stderr) = if n_absorbed == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let n = n_absorbed as f64;
        let mean = batches.iter().flat_map(|b| b.times.iter()).sum::<f64>() / n;
        let ss: f64 = batches
            .iter()
            .flat_map(|b| b.times.iter())
            .map(|t| (t - mean) * (t - mean))
            .sum();
        let var = if n_absorbed > 1 { ss / (n - 1.0) } else { 0.0 };
        (mean, (var / n).sqrt())
    };
    let unreliable = n_censored as f64 > CENSOR_LIMIT * cfg.n_paths as f64;
    if unreliable {
        warn!("{n_censored} of {} paths censored at max_steps = {}", cfg.n_paths, cfg.max_steps);
    }
    Ok(SimResult {
        mean,
        stderr,
        n_absorbed,
        n_censored,
        dt_used: dt,
        elapsed: start.elapsed().as_secs_f64(),
        unreliable,
    })
}
