//! Numerical laboratory for dispersive decay of the one-dimensional
//! Klein-Gordon equation `psi_tt = (d^2/dx^2 - m^2 + V(x)) psi` with a
//! polynomially decaying potential.
//!
//! The crate provides the free and perturbed propagators through their
//! spectral representations, the full Jost-solution scattering apparatus for
//! `H = -(d^2/dx^2 + V)`, a Born expansion of the high-energy flow, an
//! independent leapfrog time-domain solver for cross-validation, and weighted
//! operator-norm / decay-rate estimation tools.

pub mod analysis;
pub mod born;
pub mod cutoff;
pub mod error;
pub mod fourier;
pub mod free;
pub mod grid;
pub mod leapfrog;
pub mod linalg;
pub mod norms;
pub mod par;
pub mod perturbed;
pub mod potential;
pub mod scattering;
pub mod special;

pub use cutoff::{smoothstep, Cutoff};
pub use error::{KgError, Result};
pub use fourier::{fourier_transform, DerivativeScheme, Direction};
pub use grid::{make_grid, GridFn, GridSpec, KGState};
pub use norms::{weighted_norm_fn, weighted_norm_state, WeightedNormKind, WeightedSpace};
pub use potential::{sample_potential, PotentialKind, PotentialSpec};
