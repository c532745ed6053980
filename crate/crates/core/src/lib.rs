//! Numerical toolkit for the narrow escape problem: the mean first passage
//! time (MFPT) of a Brownian particle confined to a bounded domain whose
//! boundary is reflecting except for a small absorbing window.
//!
//! The crate provides several independent routes to the same quantity so
//! that each can be checked against the others:
//!
//! * [`asymptotics`]: closed-form leading-order and two-term formulas.
//! * [`collins`]: the exact Fredholm reduction of the mixed boundary value
//!   problem on a ball with a circular cap, solved by Nyström discretization.
//! * [`spectral`]: a direct Legendre-series collocation solver on the ball.
//! * [`window`]: the single-layer integral equation for the flux through a
//!   flat window of arbitrary shape.
//! * [`sim`]: a Brownian dynamics simulator with reproducible parallel RNG.
//!
//! Shared special functions, quadrature rules and the Abel transform pair live
//! in [`numerics`].

pub mod asymptotics;
pub mod collins;
pub mod error;
pub mod numerics;
pub mod sim;
pub mod spectral;
pub mod window;

pub use asymptotics::{AsymptoticMfpt, MediumSpec, Regime, WindowEllipse};
pub use collins::{B0Result, CollinsConfig, CollinsSystem, KernelMode};
pub use error::{Error, Result};
pub use numerics::quadrature::QuadratureRule;
pub use sim::{InitialCondition, SimConfig, SimGeometry, SimResult};
pub use spectral::LegendreSeriesSolution;
pub use window::{FluxSolution, PlanarWindowMesh};

/// Version tag embedded in every machine-readable output record.
pub const FORMAT_VERSION: &str = concat!("narrow-escape/", env!("CARGO_PKG_VERSION"));
