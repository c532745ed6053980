//! Closed-form MFPT formulas.
//!
//! The library is unit-agnostic: lengths, volumes, diffusion coefficients and
//! concentrations must simply be expressed in one consistent system.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Error, Result};
use crate::numerics::elliptic_k;

/// Avogadro's number, for molar concentrations.
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// Absorbing window bounded by an ellipse with semi-axes `a ≥ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEllipse {
    a: f64,
    b: f64,
    e: f64,
}

impl WindowEllipse {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        ensure_domain!(
            b > 0.0 && b <= a && a.is_finite(),
            "ellipse semi-axes must satisfy 0 < b <= a, got a={a}, b={b}"
        );
        let ratio = b / a;
        let e = ((1.0 - ratio) * (1.0 + ratio)).sqrt();
        Ok(Self { a, b, e })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(radius, radius)
    }

    /// Ellipse with large semi-axis `a` and eccentricity `e`.
    pub fn from_eccentricity(a: f64, e: f64) -> Result<Self> {
        ensure_domain!((0.0..1.0).contains(&e), "eccentricity {e} outside [0, 1)");
        let b = a * ((1.0 - e) * (1.0 + e)).sqrt();
        Ok(Self { a, b, e })
    }

    /// Ellipse of area `area` and eccentricity `e`.
    pub fn with_area(area: f64, e: f64) -> Result<Self> {
        ensure_domain!(area > 0.0, "window area must be positive, got {area}");
        ensure_domain!((0.0..1.0).contains(&e), "eccentricity {e} outside [0, 1)");
        let a = (area / PI).sqrt() / ((1.0 - e) * (1.0 + e)).powf(0.25);
        Self::from_eccentricity(a, e)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eccentricity(&self) -> f64 {
        self.e
    }

    pub fn area(&self) -> f64 {
        PI * self.a * self.b
    }
}

/// Domain volume `|Ω|` and diffusion coefficient `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub volume: f64,
    pub diffusion: f64,
}

impl MediumSpec {
    pub fn new(volume: f64, diffusion: f64) -> Result<Self> {
        ensure_domain!(volume > 0.0, "volume must be positive, got {volume}");
        ensure_domain!(diffusion > 0.0, "diffusion must be positive, got {diffusion}");
        Ok(Self { volume, diffusion })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    GeneralElliptic,
    Circular,
    Squeezed,
    SphereTwoTerm,
    CompositeChannel,
}

/// A formula value together with the named pieces it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticMfpt {
    pub value: f64,
    pub regime: Regime,
    pub correction_terms: Vec<(String, f64)>,
}

impl AsymptoticMfpt {
    fn new(value: f64, regime: Regime, terms: &[(&str, f64)]) -> Self {
        Self {
            value,
            regime,
            correction_terms: terms.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.correction_terms
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }
}

fn warn_if_large_window(medium: &MediumSpec, a: f64) {
    let scale = medium.volume.cbrt();
    if a > 0.1 * scale {
        warn!("window semi-axis {a} is not small against the domain scale {scale:.3e}");
    }
}

/// General elliptic window: `|Ω| K(e) / (2π D a)`.
pub fn mfpt_elliptic(medium: &MediumSpec, win: &WindowEllipse) -> Result<AsymptoticMfpt> {
    MediumSpec::new(medium.volume, medium.diffusion)?;
    warn_if_large_window(medium, win.a);
    let k = elliptic_k(win.e)?;
    let value = if win.e == 0.0 {
        // same expression as the circular law so the two agree bit for bit
        medium.volume / (4.0 * win.a * medium.diffusion)
    } else {
        medium.volume * k / (2.0 * PI * medium.diffusion * win.a)
    };
    Ok(AsymptoticMfpt::new(
        value,
        Regime::GeneralElliptic,
        &[("leading", value), ("elliptic_k", k)],
    ))
}

/// Circular window of radius `a`: `|Ω| / (4 a D)`.
pub fn mfpt_circular(medium: &MediumSpec, a: f64) -> Result<AsymptoticMfpt> {
    MediumSpec::new(medium.volume, medium.diffusion)?;
    ensure_domain!(a > 0.0, "hole radius must be positive, got {a}");
    warn_if_large_window(medium, a);
    let value = medium.volume / (4.0 * a * medium.diffusion);
    Ok(AsymptoticMfpt::new(value, Regime::Circular, &[("leading", value)]))
}

fn squeezed_log(e: f64) -> Result<f64> {
    if e == 1.0 {
        return Err(Error::Divergence("squeezed window with e = 1".into()));
    }
    ensure_domain!((0.0..1.0).contains(&e), "eccentricity {e} outside [0, 1)");
    if e < 0.9 {
        warn!("squeezed-window formula used at e = {e}; it is accurate only as e -> 1");
    }
    Ok((16.0 / (1.0 - e)).ln())
}

/// Elongated window, `1 − e ≪ 1`: `|Ω| log(16/(1−e)) / (4π D a)`.
pub fn mfpt_squeezed(medium: &MediumSpec, win: &WindowEllipse) -> Result<AsymptoticMfpt> {
    MediumSpec::new(medium.volume, medium.diffusion)?;
    let log_term = squeezed_log(win.e)?;
    let value = medium.volume * log_term / (4.0 * PI * medium.diffusion * win.a);
    Ok(AsymptoticMfpt::new(
        value,
        Regime::Squeezed,
        &[("leading", value), ("log_term", log_term)],
    ))
}

/// The squeezed-window law written through the window area `S`:
/// `2^{1/4} |Ω| (1−e)^{1/4} log(16/(1−e)) / (4 D √(π S))`.
pub fn mfpt_squeezed_by_area(medium: &MediumSpec, area: f64, e: f64) -> Result<AsymptoticMfpt> {
    MediumSpec::new(medium.volume, medium.diffusion)?;
    ensure_domain!(area > 0.0, "window area must be positive, got {area}");
    let log_term = squeezed_log(e)?;
    let shape = 2f64.powf(0.25) * (1.0 - e).powf(0.25);
    let value = shape * medium.volume * log_term / (4.0 * medium.diffusion * (PI * area).sqrt());
    Ok(AsymptoticMfpt::new(
        value,
        Regime::Squeezed,
        &[("leading", value), ("log_term", log_term), ("shape_factor", shape)],
    ))
}

/// Two-term law for a ball of radius `R` with a circular cap of radius `a`:
/// `(V/4aD)·[1 + (a/R) log(R/a)]`, `V = 4πR³/3`.
pub fn mfpt_sphere_two_term(radius: f64, a: f64, diffusion: f64) -> Result<AsymptoticMfpt> {
    ensure_domain!(radius > 0.0, "ball radius must be positive, got {radius}");
    ensure_domain!(diffusion > 0.0, "diffusion must be positive, got {diffusion}");
    ensure_domain!(a > 0.0 && a < radius, "cap radius {a} must lie in (0, R = {radius})");
    let volume = 4.0 * PI * radius.powi(3) / 3.0;
    let leading = volume / (4.0 * a * diffusion);
    let ratio = a / radius;
    let bracket = 1.0 + ratio * (1.0 / ratio).ln();
    Ok(AsymptoticMfpt::new(
        leading * bracket,
        Regime::SphereTwoTerm,
        &[("leading", leading), ("bracket", bracket)],
    ))
}

/// Chamber drained through a hole of radius `a` into a channel of length `L`:
/// `V/(4aD) + L²/(2D)`.
pub fn mfpt_composite_channel(
    volume: f64,
    diffusion: f64,
    a: f64,
    length: f64,
) -> Result<AsymptoticMfpt> {
    ensure_domain!(volume >= 0.0, "chamber volume must be non-negative, got {volume}");
    ensure_domain!(diffusion > 0.0, "diffusion must be positive, got {diffusion}");
    ensure_domain!(a > 0.0, "hole radius must be positive, got {a}");
    ensure_domain!(length >= 0.0, "channel length must be non-negative, got {length}");
    let chamber = volume / (4.0 * a * diffusion);
    let channel = length * length / (2.0 * diffusion);
    Ok(AsymptoticMfpt::new(
        chamber + channel,
        Regime::CompositeChannel,
        &[("chamber", chamber), ("channel", channel)],
    ))
}

/// Arrival statistics of particles at a hole from a bath of number density `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalRate {
    /// `τ̄ = 1/(4 D a C)`
    pub mean_time: f64,
    /// `4 D a C`
    pub forward_rate: f64,
}

pub fn mean_arrival_time(diffusion: f64, a: f64, concentration: f64) -> Result<ArrivalRate> {
    ensure_domain!(diffusion > 0.0, "diffusion must be positive, got {diffusion}");
    ensure_domain!(a > 0.0, "hole radius must be positive, got {a}");
    ensure_domain!(concentration > 0.0, "concentration must be positive, got {concentration}");
    let forward_rate = 4.0 * diffusion * a * concentration;
    Ok(ArrivalRate {
        mean_time: 1.0 / forward_rate,
        forward_rate,
    })
}

/// mol/L to particles per m³.
pub fn molar_to_number_density(molar: f64) -> f64 {
    molar * 1.0e3 * AVOGADRO
}
