use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const AGM_MAX_ITER: usize = 60;

/// Complete elliptic integral of the first kind, `K(e) = ∫₀^{π/2} dθ/√(1 − e² sin²θ)`,
/// as a function of the modulus `e` (the eccentricity of the window).
///
/// Computed through the arithmetic–geometric mean, `K(e) = π / (2·AGM(1, √(1 − e²)))`.
pub fn elliptic_k(e: f64) -> Result<f64> {
    if e == 1.0 {
        return Err(Error::Divergence("K(e) diverges at e = 1".into()));
    }
    if !(0.0..1.0).contains(&e) {
        return Err(Error::Domain(format!("eccentricity {e} outside [0, 1)")));
    }
    if e == 0.0 {
        return Ok(FRAC_PI_2);
    }
    // 1 - e² loses digits as e -> 1; (1-e)(1+e) does not.
    let mut a = 1.0;
    let mut b = ((1.0 - e) * (1.0 + e)).sqrt();
    for _ in 0..AGM_MAX_ITER {
        let mean = 0.5 * (a + b);
        if (a - b).abs() <= 4.0 * f64::EPSILON * mean {
            return Ok(FRAC_PI_2 / mean);
        }
        b = (a * b).sqrt();
        a = mean;
    }
    Ok(FRAC_PI_2 / (0.5 * (a + b)))
}

/// Legendre polynomial `Pₙ(x)` on `[-1, 1]` by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("legendre argument {x} outside [-1, 1]")));
    }
    Ok(legendre_unchecked(n, x))
}

pub(crate) fn legendre_unchecked(n: usize, x: f64) -> f64 {
    let mut p_prev = 1.0;
    if n == 0 {
        return p_prev;
    }
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    p
}

/// All of `P₀(x) … P_nmax(x)` in one pass of the recurrence.
pub fn legendre_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax == 0 {
        return out;
    }
    out.push(x);
    for k in 1..nmax {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `Pₙ(x)` together with `P'ₙ(x)`, used by the Gauss–Legendre node search.
pub(crate) fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let p = legendre_unchecked(n, x);
    let p_prev = if n == 0 { 0.0 } else { legendre_unchecked(n - 1, x) };
    let nf = n as f64;
    let dp = nf * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}
