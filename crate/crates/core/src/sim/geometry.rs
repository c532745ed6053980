use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Result};

/// Domain shapes the simulator knows how to step through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SimGeometry {
    /// Ball of radius `radius` centred at the origin; absorbing cap of polar
    /// half-angle `eps` around `+z`. `eps = 0` gives a closed ball.
    BallWithCap { radius: f64, eps: f64 },
    /// Cylinder `0 ≤ z ≤ length`, absorbing at `z = 0`, reflecting elsewhere.
    CylinderAxial { length: f64, radius: f64 },
    /// Box `[0,lx]×[0,ly]×[0,lz]` with an elliptic window on the face `z = 0`
    /// centred at `(lx/2, ly/2)`, semi-axis `a` along x and `b` along y.
    BoxWithEllipticWindow {
        lx: f64,
        ly: f64,
        lz: f64,
        a: f64,
        b: f64,
    },
}

/// Outcome of one Euler step.
pub(crate) enum Step {
    Inside,
    Absorbed,
}

impl SimGeometry {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SimGeometry::BallWithCap { radius, eps } => {
                ensure_domain!(radius > 0.0, "ball radius must be positive, got {radius}");
                ensure_domain!((0.0..PI).contains(&eps), "cap angle must lie in [0, π), got {eps}");
            }
            SimGeometry::CylinderAxial { length, radius } => {
                ensure_domain!(length > 0.0 && radius > 0.0, "cylinder needs positive length and radius");
            }
            SimGeometry::BoxWithEllipticWindow { lx, ly, lz, a, b } => {
                ensure_domain!(lx > 0.0 && ly > 0.0 && lz > 0.0, "box sides must be positive");
                ensure_domain!(a > 0.0 && b > 0.0, "window semi-axes must be positive");
                ensure_domain!(a <= lx / 2.0 && b <= ly / 2.0, "window does not fit inside the face");
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            SimGeometry::BallWithCap { .. } => "ball",
            SimGeometry::CylinderAxial { .. } => "cylinder",
            SimGeometry::BoxWithEllipticWindow { .. } => "box",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            SimGeometry::BallWithCap { radius, eps } => vec![("R", radius), ("eps", eps)],
            SimGeometry::CylinderAxial { length, radius } => vec![("L", length), ("radius", radius)],
            SimGeometry::BoxWithEllipticWindow { lx, ly, lz, a, b } => {
                vec![("Lx", lx), ("Ly", ly), ("Lz", lz), ("a", a), ("b", b)]
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            SimGeometry::BallWithCap { radius, .. } => 4.0 / 3.0 * PI * radius.powi(3),
            SimGeometry::CylinderAxial { length, radius } => PI * radius * radius * length,
            SimGeometry::BoxWithEllipticWindow { lx, ly, lz, .. } => lx * ly * lz,
        }
    }

    /// Length scale the step must resolve: the window radius, or the cylinder
    /// length (the lateral wall is flat in the only coordinate that matters).
    pub fn feature_size(&self) -> f64 {
        match *self {
            SimGeometry::BallWithCap { radius, eps } => radius * eps.sin(),
            SimGeometry::CylinderAxial { length, .. } => length,
            SimGeometry::BoxWithEllipticWindow { a, b, .. } => a.min(b),
        }
    }

    /// Default time step: a tenth of the feature size per step for windows,
    /// a fiftieth of the length for the cylinder.
    pub fn default_dt(&self, diffusion: f64) -> f64 {
        let h = match self {
            SimGeometry::CylinderAxial { .. } => self.feature_size() / 50.0,
            _ => self.feature_size() / 10.0,
        };
        h * h / (2.0 * diffusion)
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        match *self {
            SimGeometry::BallWithCap { radius, .. } => norm(p) <= radius,
            SimGeometry::CylinderAxial { length, radius } => {
                p[0].hypot(p[1]) <= radius && (0.0..=length).contains(&p[2])
            }
            SimGeometry::BoxWithEllipticWindow { lx, ly, lz, .. } => {
                (0.0..=lx).contains(&p[0]) && (0.0..=ly).contains(&p[1]) && (0.0..=lz).contains(&p[2])
            }
        }
    }

    pub(crate) fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        match *self {
            SimGeometry::BallWithCap { radius, .. } => loop {
                let p = [
                    radius * rng.random_range(-1.0..1.0),
                    radius * rng.random_range(-1.0..1.0),
                    radius * rng.random_range(-1.0..1.0),
                ];
                if norm(p) < radius {
                    return p;
                }
            },
            SimGeometry::CylinderAxial { length, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let phi = 2.0 * PI * rng.random::<f64>();
                [r * phi.cos(), r * phi.sin(), length * rng.random::<f64>()]
            }
            SimGeometry::BoxWithEllipticWindow { lx, ly, lz, .. } => [
                lx * rng.random::<f64>(),
                ly * rng.random::<f64>(),
                lz * rng.random::<f64>(),
            ],
        }
    }

    /// Signed distance to the plane (or sphere) carrying the absorbing
    /// window; positive inside.
    fn window_gap(&self, p: [f64; 3]) -> f64 {
        match *self {
            SimGeometry::BallWithCap { radius, .. } => radius - norm(p),
            SimGeometry::CylinderAxial { .. } | SimGeometry::BoxWithEllipticWindow { .. } => p[2],
        }
    }

    /// Does a touch of the carrying surface near `p` land on the window?
    fn on_window(&self, p: [f64; 3]) -> bool {
        match *self {
            SimGeometry::BallWithCap { eps, .. } => polar_angle(p) < eps,
            SimGeometry::CylinderAxial { .. } => true,
            SimGeometry::BoxWithEllipticWindow { lx, ly, a, b, .. } => {
                ((p[0] - lx / 2.0) / a).powi(2) + ((p[1] - ly / 2.0) / b).powi(2) < 1.0
            }
        }
    }

    /// Lower bound on the lateral distance from `p` to the window rim.
    fn rim_gap(&self, p: [f64; 3]) -> f64 {
        match *self {
            SimGeometry::BallWithCap { radius, eps } => radius * (polar_angle(p) - eps).abs(),
            SimGeometry::CylinderAxial { .. } => f64::INFINITY,
            SimGeometry::BoxWithEllipticWindow { lx, ly, a, b, .. } => {
                let q = ((p[0] - lx / 2.0) / a).powi(2) + ((p[1] - ly / 2.0) / b).powi(2);
                // √q is Lipschitz with constant 1/min(a, b)
                (q.sqrt() - 1.0).abs() * a.min(b)
            }
        }
    }

    /// Did the free Brownian bridge from `x0` to `x1`, with per-coordinate
    /// variance `var`, touch the window?
    ///
    /// Reflection is a mirror image, so the reflected path touches the wall
    /// exactly where the free path changes side. Far from the rim the touch
    /// point is taken from the chord; near the rim the bridge is split at a
    /// sampled midpoint and both halves are examined, since paths just
    /// outside the rim outnumber those just inside and a chord estimate
    /// would miss absorptions systematically.
    fn bridge_absorbs<R: Rng + ?Sized>(
        &self,
        x0: [f64; 3],
        x1: [f64; 3],
        var: f64,
        depth: u32,
        rng: &mut R,
    ) -> bool {
        let d0 = self.window_gap(x0);
        let d1 = self.window_gap(x1);
        let crossed = (d0 > 0.0) != (d1 > 0.0);
        let probe = if crossed {
            let t = d0 / (d0 - d1);
            lerp(x0, x1, t)
        } else {
            let p = (-2.0 * d0 * d1 / var).exp();
            if p < 1e-15 {
                return false;
            }
            lerp(x0, x1, 0.5)
        };
        if depth == 0 || self.rim_gap(probe) > RIM_RESOLVE * var.sqrt() {
            return self.on_window(probe)
                && (crossed || rng.random::<f64>() < (-2.0 * d0 * d1 / var).exp());
        }
        let s = (var / 4.0).sqrt();
        let mid = lerp(x0, x1, 0.5);
        let m = [
            mid[0] + s * rng.sample::<f64, _>(StandardNormal),
            mid[1] + s * rng.sample::<f64, _>(StandardNormal),
            mid[2] + s * rng.sample::<f64, _>(StandardNormal),
        ];
        self.bridge_absorbs(x0, m, var / 2.0, depth - 1, rng)
            || self.bridge_absorbs(m, x1, var / 2.0, depth - 1, rng)
    }

    /// Move from `x` by `dx`, resolving absorption and reflection.
    ///
    /// `sigma2` is the per-coordinate step variance `2 D dt`.
    pub(crate) fn advance<R: Rng + ?Sized>(
        &self,
        x: &mut [f64; 3],
        dx: [f64; 3],
        sigma2: f64,
        rng: &mut R,
    ) -> Step {
        let x1 = [x[0] + dx[0], x[1] + dx[1], x[2] + dx[2]];
        if self.bridge_absorbs(*x, x1, sigma2, REFINE_DEPTH, rng) {
            return Step::Absorbed;
        }
        match *self {
            SimGeometry::BallWithCap { radius, .. } => reflect_ball(x, x1, radius),
            SimGeometry::CylinderAxial { length, radius } => {
                let (mut px, mut py) = (x1[0], x1[1]);
                let r = px.hypot(py);
                if r > radius {
                    let s = (2.0 * radius - r).max(0.0) / r;
                    px *= s;
                    py *= s;
                }
                *x = [px, py, fold(x1[2], 0.0, length)];
            }
            SimGeometry::BoxWithEllipticWindow { lx, ly, lz, .. } => {
                *x = [fold(x1[0], 0.0, lx), fold(x1[1], 0.0, ly), fold(x1[2], 0.0, lz)];
            }
        }
        Step::Inside
    }
}

/// Bridge splits allowed per step; each halves the lateral uncertainty
/// of the touch point by √2.
const REFINE_DEPTH: u32 = 10;
/// Split only when the rim is within this many standard deviations.
const RIM_RESOLVE: f64 = 4.0;

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

fn norm(p: [f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

/// Mirror `v` back into `[lo, hi]`; repeated folds cover steps longer than
/// the interval.
fn fold(mut v: f64, lo: f64, hi: f64) -> f64 {
    loop {
        if v > hi {
            v = 2.0 * hi - v;
        } else if v < lo {
            v = 2.0 * lo - v;
        } else {
            return v;
        }
    }
}

fn polar_angle(p: [f64; 3]) -> f64 {
    p[0].hypot(p[1]).atan2(p[2])
}

/// Specular reflection of the step `x → x1` at the sphere of radius `radius`.
fn reflect_ball(x: &mut [f64; 3], x1: [f64; 3], radius: f64) {
    let r1 = norm(x1);
    if r1 <= radius {
        *x = x1;
        return;
    }
    let dx = [x1[0] - x[0], x1[1] - x[1], x1[2] - x[2]];
    // exit point on the sphere: |x + t dx| = R with t in (0, 1]
    let aa = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
    let bb = x[0] * dx[0] + x[1] * dx[1] + x[2] * dx[2];
    let cc = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - radius * radius;
    let t = ((-bb + (bb * bb - aa * cc).max(0.0).sqrt()) / aa).clamp(0.0, 1.0);
    let p = lerp(*x, x1, t);
    // mirror across the tangent plane at p
    let n = [p[0] / radius, p[1] / radius, p[2] / radius];
    let over = (x1[0] - p[0]) * n[0] + (x1[1] - p[1]) * n[1] + (x1[2] - p[2]) * n[2];
    let mut y = [x1[0] - 2.0 * over * n[0], x1[1] - 2.0 * over * n[1], x1[2] - 2.0 * over * n[2]];
    let ry = norm(y);
    if ry > radius {
        // curvature can leave the mirrored point just outside
        let s = (2.0 * radius - ry).max(0.0) / ry;
        y = [y[0] * s, y[1] * s, y[2] * s];
    }
    *x = y;
}
