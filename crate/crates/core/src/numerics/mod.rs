//! Special functions, quadrature rules and the Abel transform pair.

pub mod abel;
pub mod linalg;
pub mod quadrature;
pub mod special;

pub use abel::{abel_forward, abel_invert, AbelPair};
pub use quadrature::{gauss_rule, tanh_sinh, QuadratureRule};
pub use special::{elliptic_k, legendre_all, legendre_p};
