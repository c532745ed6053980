//! Leading-order flux through a small flat window.
//!
//! Near the window only the singular part of the Neumann function matters,
//! and the flux density `g` solves the single-layer equation
//!
//! ```text
//! (1/2π) ∫_window g(x) / |x − y| dS_x = C₀    for y in the window,
//! ∫_window g dS = |Ω| / D,
//! ```
//!
//! where `C₀` is the leading-order MFPT.

mod mesh;
mod oracle;
mod solve;

pub use mesh::{build_ellipse_mesh, Element, PlanarWindowMesh, WindowShape};
pub use oracle::{elliptic_flux_oracle, verify_constant_potential, PotentialReport};
pub use solve::{solve_window_ie, solve_window_ie_with, FluxSolution, SolverOptions};
