//! Special functions and oscillatory quadrature.

mod bessel;
mod oscquad;

pub use bessel::bessel_j0;
pub use oscquad::{oscillatory_integral, required_nodes, QuadKind, QuadratureRule};
