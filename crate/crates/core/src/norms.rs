//! Weighted Sobolev norms with polynomial weights `<x>^sigma = (1+x^2)^{sigma/2}`.
//!
//! `W^{l,p}_sigma` norms are sums `sum_{k<=l} ||<x>^sigma f^(k)||_{L^p}`; the
//! pair spaces combine a first-order norm on `psi` with a zero-order norm on
//! `psidot`:
//!
//! * `FSigma      = H^1_sigma (+) L^2_sigma`
//! * `L1PairSigma = W^{1,1}_sigma (+) L^1_sigma`
//! * `LinfPairSigma = W^{1,inf}_sigma (+) L^inf_sigma`
//!
//! Quadrature is the rectangle rule with weight `dx`.

use crate::fourier::{derivative, DerivativeScheme};
use crate::grid::{GridFn, KGState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightedSpace {
    FSigma,
    L2Sigma,
    H1Sigma,
    L1PairSigma,
    LinfPairSigma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormKind {
    pub space: WeightedSpace,
    pub sigma: f64,
    pub derivative: DerivativeScheme,
}

impl WeightedNormKind {
    pub fn new(space: WeightedSpace, sigma: f64) -> Self {
        Self {
            space,
            sigma,
            derivative: DerivativeScheme::Spectral,
        }
    }

    pub fn with_derivative(mut self, scheme: DerivativeScheme) -> Self {
        self.derivative = scheme;
        self
    }
}

pub(crate) fn weight(x: f64, sigma: f64) -> f64 {
    (1.0 + x * x).powf(sigma / 2.0)
}

enum P {
    One,
    Two,
    Inf,
}

fn lp_weighted(f: &GridFn, sigma: f64, p: P) -> f64 {
    let grid = f.grid();
    let dx = grid.dx();
    match p {
        P::One => {
            f.values()
                .iter()
                .enumerate()
                .map(|(j, v)| v.norm() * weight(grid.x(j), sigma))
                .sum::<f64>()
                * dx
        }
        P::Two => (f
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let w = weight(grid.x(j), sigma);
                v.norm_sqr() * w * w
            })
            .sum::<f64>()
            * dx)
            .sqrt(),
        P::Inf => f
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| v.norm() * weight(grid.x(j), sigma))
            .fold(0.0, f64::max),
    }
}

/// Weighted norm of a scalar grid function. For the pair spaces the scalar is
/// treated as the first component (first-order part of the norm).
pub fn weighted_norm_fn(f: &GridFn, kind: &WeightedNormKind) -> f64 {
    let sigma = kind.sigma;
    match kind.space {
        WeightedSpace::L2Sigma => lp_weighted(f, sigma, P::Two),
        WeightedSpace::H1Sigma | WeightedSpace::FSigma => {
            let df = derivative(f, kind.derivative);
            lp_weighted(f, sigma, P::Two) + lp_weighted(&df, sigma, P::Two)
        }
        WeightedSpace::L1PairSigma => {
            let df = derivative(f, kind.derivative);
            lp_weighted(f, sigma, P::One) + lp_weighted(&df, sigma, P::One)
        }
        WeightedSpace::LinfPairSigma => {
            let df = derivative(f, kind.derivative);
            lp_weighted(f, sigma, P::Inf) + lp_weighted(&df, sigma, P::Inf)
        }
    }
}

/// Weighted norm of a two-component state.
pub fn weighted_norm_state(state: &KGState, kind: &WeightedNormKind) -> f64 {
    let sigma = kind.sigma;
    match kind.space {
        WeightedSpace::L2Sigma => {
            (lp_weighted(&state.psi, sigma, P::Two).powi(2)
                + lp_weighted(&state.psidot, sigma, P::Two).powi(2))
            .sqrt()
        }
        WeightedSpace::FSigma | WeightedSpace::H1Sigma => {
            let dpsi = derivative(&state.psi, kind.derivative);
            lp_weighted(&state.psi, sigma, P::Two)
                + lp_weighted(&dpsi, sigma, P::Two)
                + lp_weighted(&state.psidot, sigma, P::Two)
        }
        WeightedSpace::L1PairSigma => {
            let dpsi = derivative(&state.psi, kind.derivative);
            lp_weighted(&state.psi, sigma, P::One)
                + lp_weighted(&dpsi, sigma, P::One)
                + lp_weighted(&state.psidot, sigma, P::One)
        }
        WeightedSpace::LinfPairSigma => {
            let dpsi = derivative(&state.psi, kind.derivative);
            lp_weighted(&state.psi, sigma, P::Inf)
                + lp_weighted(&dpsi, sigma, P::Inf)
                + lp_weighted(&state.psidot, sigma, P::Inf)
        }
    }
}
