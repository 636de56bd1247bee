//! Quadrature of oscillatory integrals
//! `Int_{k_lo}^{k_hi} a(k) e^{i (t w(k) + p k)} dk` with `w(k) = sqrt(k^2+m^2)`.

use num_complex::Complex64;

use crate::error::{KgError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    /// Composite trapezoid on uniformly spaced nodes. Subject to the
    /// resolution rule `n >= 10 t k_max / (2 pi)`.
    Trapezoid,
    /// Linear interpolation of amplitude and phase per panel, with the
    /// linearized oscillatory factor integrated in closed form. Insensitive
    /// to large `t`, limited by phase curvature per panel.
    FilonLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    pub kind: QuadKind,
    pub n_nodes: usize,
}

impl QuadratureRule {
    pub fn new(kind: QuadKind, n_nodes: usize) -> Result<Self> {
        if n_nodes < 32 {
            return Err(KgError::NodeCountTooLow {
                required: 32,
                given: n_nodes,
            });
        }
        Ok(Self { kind, n_nodes })
    }

    pub fn trapezoid(n_nodes: usize) -> Result<Self> {
        Self::new(QuadKind::Trapezoid, n_nodes)
    }

    pub fn filon(n_nodes: usize) -> Result<Self> {
        Self::new(QuadKind::FilonLinear, n_nodes)
    }
}

/// Minimum trapezoid node count for phase `t w(k)` resolved on `|k| <= k_abs_max`:
/// ten nodes per phase period, `ceil(10 |t| k_abs_max / 2 pi)`, at least 32.
pub fn required_nodes(t: f64, k_abs_max: f64) -> usize {
    let min = (10.0 * t.abs() * k_abs_max / (2.0 * std::f64::consts::PI)).ceil() as usize;
    min.max(32)
}

#[inline]
fn phase(k: f64, t: f64, p: f64, m: f64) -> f64 {
    t * (k * k + m * m).sqrt() + p * k
}

/// `E0(theta) = Int_0^1 e^{i s theta} ds`.
fn moment0(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        let it = Complex64::new(0.0, theta);
        Complex64::new(1.0, 0.0) + it / 2.0 + it * it / 6.0 + it * it * it / 24.0
    } else {
        let it = Complex64::new(0.0, theta);
        (it.exp() - 1.0) / it
    }
}

/// `E1(theta) = Int_0^1 s e^{i s theta} ds`.
fn moment1(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        let it = Complex64::new(0.0, theta);
        Complex64::new(0.5, 0.0) + it / 3.0 + it * it / 8.0 + it * it * it / 30.0
    } else {
        let it = Complex64::new(0.0, theta);
        (it.exp() * (it - 1.0) + 1.0) / (it * it)
    }
}

/// Evaluate the oscillatory integral with the given rule.
///
/// The amplitude closure is sampled at the rule's uniformly spaced nodes; it
/// should be smooth or smoothly cut off on `[k_lo, k_hi]`.
pub fn oscillatory_integral(
    amplitude: impl Fn(f64) -> Complex64,
    k_lo: f64,
    k_hi: f64,
    t: f64,
    p: f64,
    m: f64,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    if !(k_lo < k_hi) {
        return Err(KgError::Invalid(format!(
            "oscillatory integral needs k_lo < k_hi, got [{k_lo}, {k_hi}]"
        )));
    }
    let n = rule.n_nodes;
    if n < 32 {
        return Err(KgError::NodeCountTooLow {
            required: 32,
            given: n,
        });
    }
    match rule.kind {
        QuadKind::Trapezoid => {
            let k_abs = k_lo.abs().max(k_hi.abs());
            let required = required_nodes(t, k_abs);
            if n < required {
                return Err(KgError::NodeCountTooLow { required, given: n });
            }
            let h = (k_hi - k_lo) / (n - 1) as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let k = k_lo + i as f64 * h;
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                sum += amplitude(k) * Complex64::from_polar(w, phase(k, t, p, m));
            }
            Ok(sum * h)
        }
        QuadKind::FilonLinear => {
            let h = (k_hi - k_lo) / (n - 1) as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            let mut a_prev = amplitude(k_lo);
            let mut phi_prev = phase(k_lo, t, p, m);
            for i in 1..n {
                let k = k_lo + i as f64 * h;
                let a = amplitude(k);
                let phi = phase(k, t, p, m);
                let dphi = phi - phi_prev;
                let e = Complex64::from_polar(1.0, phi_prev);
                sum += e * (a_prev * moment0(dphi) + (a - a_prev) * moment1(dphi)) * h;
                a_prev = a;
                phi_prev = phi;
            }
            Ok(sum)
        }
    }
}
