//! Reference implementations used only by the tests. Nothing here calls into
//! the library, so agreement is evidence rather than tautology.
#![allow(dead_code)]

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod value, error estimate, and `∫|f|` for the rounding floor.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let x = h * XGK[j];
        let (fl, fr) = (f(c - x), f(c + x));
        kron += WGK[j] * (fl + fr);
        abs += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }
    (kron * h, ((kron - gauss) * h).abs(), abs * h.abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (v, err, abs) = gk15(f, a, b);
    // below the rounding floor further splits only chase noise
    let floor = 50.0 * f64::EPSILON * abs;
    if err <= tol.max(floor) || depth == 0 || (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod (7/15) quadrature with absolute tolerance `tol`.
/// Endpoint singularities are handled by bisection alone; the 15 nodes are
/// interior so integrable singularities at `a` or `b` are never sampled.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 50)
}

/// `∫₀^{π/2} dθ / √(1 − e² sin² θ)` by direct quadrature.
pub fn elliptic_k_oracle(e: f64) -> f64 {
    integrate(|t| 1.0 / (1.0 - e * e * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14)
}

/// Legendre polynomial from the explicit sum
/// `Pₙ(x) = 2⁻ⁿ Σ_k (−1)^k C(n,k) C(2n−2k, n) x^{n−2k}`.
pub fn legendre_explicit(n: usize, x: f64) -> f64 {
    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
    let mut s = 0.0;
    for k in 0..=n / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom(n, k) * binom(2 * n - 2 * k, n) * x.powi((n - 2 * k) as i32);
    }
    s / 2f64.powi(n as i32)
}

/// Truncated defining series of the Collins kernel, summed in pairs from
/// the tail to limit rounding.
pub fn kernel_series_oracle(u: f64, v: f64, terms: usize) -> f64 {
    let mut s = 0.0;
    for n in (1..=terms).rev() {
        let k = n as f64 + 0.5;
        s += (k * u).cos() * (k * v).cos() / (2.0 * n as f64);
    }
    2.0 / PI * s
}

/// `(1/2π) ∫_u^ε h(α) sin α / √(cos u − cos α) dα`; the substitution
/// `α = u + (ε − u)s²` removes the inverse square root at `α = u`.
pub fn abel_forward_oracle<F: Fn(f64) -> f64>(h: F, eps: f64, u: f64) -> f64 {
    if u >= eps {
        return 0.0;
    }
    let len = eps - u;
    let g = |s: f64| {
        let a = u + len * s * s;
        let gap = 2.0 * ((a + u) / 2.0).sin() * (len * s * s / 2.0).sin();
        if gap <= 0.0 {
            return 0.0;
        }
        h(a) * a.sin() * 2.0 * len * s / gap.sqrt()
    };
    integrate(g, 0.0, 1.0, 1e-13) / (2.0 * PI)
}
