//! Symbolic potentials with verified polynomial decay.
//!
//! Sign convention: the wave generator is `K = d^2/dx^2 - m^2 + V`, so the
//! associated Schroedinger operator is `H = -(d^2/dx^2 + V)`. A textbook
//! attractive well `-A sech^2(x)` therefore appears here as `V = A sech^2(x)`
//! with `A > 0`.

use crate::error::{KgError, Result};
use crate::grid::{GridFn, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `V(x) = amplitude * sech^2(x)`.
    SechSquared { amplitude: f64 },
    /// `V(x) = amplitude * exp(-(x/width)^2)`.
    Gaussian { amplitude: f64, width: f64 },
    /// `V(x) = amplitude * <x>^{-beta}`, `<x> = sqrt(1+x^2)`.
    Power { amplitude: f64, beta: f64 },
}

/// A potential together with its claimed decay exponent
/// `|V(x)| <= C <x>^{-beta_claim}`. The claim is checked when sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub beta_claim: f64,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, beta_claim: f64) -> Result<Self> {
        if !beta_claim.is_finite() || beta_claim <= 0.0 {
            return Err(KgError::InvalidPotential {
                reason: format!("beta_claim = {beta_claim} must be positive and finite"),
            });
        }
        match kind {
            PotentialKind::Gaussian { width, .. } if width <= 0.0 => {
                return Err(KgError::InvalidPotential {
                    reason: format!("gaussian width = {width} must be positive"),
                })
            }
            PotentialKind::Power { beta, .. } if beta <= 0.0 => {
                return Err(KgError::InvalidPotential {
                    reason: format!("power beta = {beta} must be positive"),
                })
            }
            _ => {}
        }
        Ok(Self { kind, beta_claim })
    }

    pub fn zero() -> Self {
        Self {
            kind: PotentialKind::Zero,
            beta_claim: 4.0,
        }
    }

    /// `A sech^2(x)` with a default decay claim of 4 (the true decay is
    /// exponential, so any polynomial rate is admissible).
    pub fn sech_squared(amplitude: f64) -> Self {
        Self {
            kind: PotentialKind::SechSquared { amplitude },
            beta_claim: 4.0,
        }
    }

    pub fn gaussian(amplitude: f64, width: f64) -> Result<Self> {
        Self::new(PotentialKind::Gaussian { amplitude, width }, 4.0)
    }

    pub fn power(amplitude: f64, beta: f64) -> Result<Self> {
        Self::new(PotentialKind::Power { amplitude, beta }, beta)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    /// Pointwise evaluation anywhere on the line.
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::SechSquared { amplitude } => {
                let c = x.cosh();
                // cosh overflows to inf for |x| > ~710; 1/inf = 0 is the right limit
                amplitude / (c * c)
            }
            PotentialKind::Gaussian { amplitude, width } => {
                let u = x / width;
                amplitude * (-u * u).exp()
            }
            PotentialKind::Power { amplitude, beta } => {
                amplitude * (1.0 + x * x).powf(-beta / 2.0)
            }
        }
    }

    /// Discrete L^1 norm on the grid.
    pub fn l1_norm(&self, grid: &GridSpec) -> f64 {
        let dx = grid.dx();
        (0..grid.n_points()).map(|j| self.eval(grid.x(j)).abs()).sum::<f64>() * dx
    }

    /// Best constant `C = max |V| <x>^{beta_claim}` over the grid, after
    /// verifying the weighted samples actually stop growing toward the box
    /// edge (otherwise the claim is too strong for this kind).
    pub fn decay_constant(&self, grid: &GridSpec) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let weighted = |x: f64| self.eval(x).abs() * (1.0 + x * x).powf(self.beta_claim / 2.0);
        let mut c_all: f64 = 0.0;
        for j in 0..grid.n_points() {
            c_all = c_all.max(weighted(grid.x(j)));
        }
        // Tail test: the weighted profile must not keep growing at the edge.
        let l = grid.half_width();
        let c_mid = weighted(l / 2.0).max(weighted(-l / 2.0));
        let edge = grid.x(grid.n_points() - 1);
        let c_edge = weighted(edge).max(weighted(-l));
        if c_edge > 1.01 * c_mid.max(1e-300) && c_edge >= 0.99 * c_all {
            return Err(KgError::PotentialDecay {
                beta_claim: self.beta_claim,
                constant_mid: c_mid,
                constant_edge: c_edge,
            });
        }
        Ok(c_all)
    }
}

/// Sample a potential on the grid, verifying the decay claim.
pub fn sample_potential(spec: &PotentialSpec, grid: &GridSpec) -> Result<GridFn> {
    spec.decay_constant(grid)?;
    Ok(GridFn::from_real_fn(*grid, |x| spec.eval(x)))
}
