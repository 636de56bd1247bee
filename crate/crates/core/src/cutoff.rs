//! Smooth spectral cutoffs built from the exponential smoothstep.

use crate::error::{KgError, Result};

/// C-infinity transition `s(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)})`,
/// extended by 0 for `u <= 0` and 1 for `u >= 1`. Monotone on [0, 1] with
/// `s(1/2) = 1/2`.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// Smooth cutoff multipliers used throughout the spectral representations.
///
/// `Band` and `ZetaHigh` are functions of the spectral parameter
/// `w = k^2 + m^2`; `XiHigh` is a function of the wavenumber `k` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// Compactly supported bump on `[lo, hi]` in the spectral parameter:
    /// rises on `[lo, lo+tau]`, equals 1 on `[lo+tau, hi-tau]`, falls on
    /// `[hi-tau, hi]`, with `tau = (hi-lo)/4`.
    Band { lo: f64, hi: f64 },
    /// High-energy cutoff: 0 for `w <= m^2+1`, 1 for `w >= m^2+2`.
    ZetaHigh { m: f64 },
    /// Wavenumber cutoff: 0 for `|k| <= 1`, 1 for `|k| >= 2`.
    XiHigh,
}

impl Cutoff {
    /// Validated band constructor (`lo < hi` required).
    pub fn band(lo: f64, hi: f64) -> Result<Cutoff> {
        if !(lo < hi) {
            return Err(KgError::InvalidCutoff {
                reason: format!("band requires lo < hi, got [{lo}, {hi}]"),
            });
        }
        Ok(Cutoff::Band { lo, hi })
    }

    /// Evaluate the cutoff at its natural argument (spectral parameter for
    /// `Band`/`ZetaHigh`, wavenumber for `XiHigh`). Output lies in [0, 1].
    pub fn eval(&self, arg: f64) -> f64 {
        match *self {
            Cutoff::Band { lo, hi } => {
                if lo >= hi {
                    return 0.0;
                }
                let tau = (hi - lo) / 4.0;
                smoothstep((arg - lo) / tau) * smoothstep((hi - arg) / tau)
            }
            Cutoff::ZetaHigh { m } => smoothstep(arg - (m * m + 1.0)),
            Cutoff::XiHigh => smoothstep(arg.abs() - 1.0),
        }
    }

    /// Evaluate as a multiplier at wavenumber `k` for mass `m`, mapping to the
    /// spectral parameter where appropriate.
    pub fn eval_at_k(&self, k: f64, m: f64) -> f64 {
        match self {
            Cutoff::XiHigh => self.eval(k),
            _ => self.eval(k * k + m * m),
        }
    }
}
