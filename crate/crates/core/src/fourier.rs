//! Discrete realization of the continuum Fourier transform
//! `f^(k) = Int e^{-iky} f(y) dy`, its inverse (carrying `1/2pi`), and
//! spectral/finite-difference derivatives on the periodic grid.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{GridFn, GridSpec};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

pub(crate) fn dft_forward(buf: &mut [Complex64]) {
    plan_forward(buf.len()).process(buf);
}

pub(crate) fn dft_inverse_unnormalized(buf: &mut [Complex64]) {
    plan_inverse(buf.len()).process(buf);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// DFT frequency for bin `n` on an `N`-point grid with spacing `dx`,
/// wrapped to `(-pi/dx, pi/dx]`.
pub fn dft_wavenumber(n: usize, n_points: usize, dx: f64) -> f64 {
    let n = n as isize;
    let np = n_points as isize;
    let wrapped = if n <= np / 2 { n } else { n - np };
    2.0 * std::f64::consts::PI * wrapped as f64 / (np as f64 * dx)
}

/// All DFT frequencies in bin order.
pub fn dft_wavenumbers(grid: &GridSpec) -> Vec<f64> {
    (0..grid.n_points())
        .map(|n| dft_wavenumber(n, grid.n_points(), grid.dx()))
        .collect()
}

/// Continuum-normalized transform on the grid.
///
/// Forward returns samples of `f^(k_n) ~ dx * sum_j f(x_j) e^{-i k_n x_j}` at
/// the DFT frequencies (bin order); Inverse applies `(1/2pi) Int e^{ikx} dk`
/// so that the round trip is the identity to machine precision.
pub fn fourier_transform(f: &GridFn, direction: Direction) -> GridFn {
    let grid = *f.grid();
    let n = grid.n_points();
    let dx = grid.dx();
    let l = grid.half_width();
    let mut buf: Vec<Complex64> = f.values().to_vec();
    match direction {
        Direction::Forward => {
            dft_forward(&mut buf);
            for (i, v) in buf.iter_mut().enumerate() {
                let k = dft_wavenumber(i, n, dx);
                // x_j = -L + j dx, so e^{-ik x_j} = e^{ikL} e^{-ik j dx}
                *v *= dx * Complex64::from_polar(1.0, k * l);
            }
        }
        Direction::Inverse => {
            for (i, v) in buf.iter_mut().enumerate() {
                let k = dft_wavenumber(i, n, dx);
                *v *= Complex64::from_polar(1.0, -k * l) / dx;
            }
            dft_inverse_unnormalized(&mut buf);
            let scale = 1.0 / n as f64;
            for v in buf.iter_mut() {
                *v *= scale;
            }
        }
    }
    GridFn::new(grid, buf).expect("transform preserves length")
}

/// Derivative schemes for weighted Sobolev norms and operator assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeScheme {
    #[default]
    Spectral,
    Fd2,
}

/// Spectral derivative via the DFT (Nyquist bin zeroed).
pub fn spectral_derivative(f: &GridFn) -> GridFn {
    let grid = *f.grid();
    let n = grid.n_points();
    let dx = grid.dx();
    let mut buf: Vec<Complex64> = f.values().to_vec();
    dft_forward(&mut buf);
    for (i, v) in buf.iter_mut().enumerate() {
        if n % 2 == 0 && i == n / 2 {
            *v = Complex64::new(0.0, 0.0);
        } else {
            let k = dft_wavenumber(i, n, dx);
            *v *= Complex64::new(0.0, k);
        }
    }
    dft_inverse_unnormalized(&mut buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    GridFn::new(grid, buf).expect("derivative preserves length")
}

/// Second-order centered difference with periodic wrap.
pub fn fd2_derivative(f: &GridFn) -> GridFn {
    let grid = *f.grid();
    let n = grid.n_points();
    let two_dx = 2.0 * grid.dx();
    let v = f.values();
    let out: Vec<Complex64> = (0..n)
        .map(|j| (v[(j + 1) % n] - v[(j + n - 1) % n]) / two_dx)
        .collect();
    GridFn::new(grid, out).expect("derivative preserves length")
}

pub fn derivative(f: &GridFn, scheme: DerivativeScheme) -> GridFn {
    match scheme {
        DerivativeScheme::Spectral => spectral_derivative(f),
        DerivativeScheme::Fd2 => fd2_derivative(f),
    }
}
