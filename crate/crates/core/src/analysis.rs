//! Weighted operator-norm estimation, power-law decay fitting, the
//! interpolation-inequality check, and oscillatory sup-bound experiments.

use num_complex::Complex64;

use crate::cutoff::Cutoff;
use crate::error::{KgError, Result};
use crate::fourier::{derivative, DerivativeScheme};
use crate::grid::{GridFn, GridSpec};
use crate::linalg::{power_iteration_largest_sv, CMat, Cholesky};
use crate::norms::weight;
use crate::par;
use crate::special::{oscillatory_integral, required_nodes, QuadratureRule};

/// Fitted power law `value ~ e^{log_prefactor} t^{exponent}`.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub exponent: f64,
    pub log_prefactor: f64,
    pub rms_residual: f64,
    pub t_window: (f64, f64),
    pub n_samples: usize,
}

/// Least squares on `(log t, log value)`.
pub fn decay_fit(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(KgError::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < 6 {
        return Err(KgError::BadFitInput);
    }
    if times[0] < 1.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KgError::BadFitInput);
    }
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(KgError::BadFitInput);
    }
    let n = times.len() as f64;
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        exponent: slope,
        log_prefactor: intercept,
        rms_residual: rms,
        t_window: (times[0], *times.last().unwrap()),
        n_samples: times.len(),
    })
}

/// Dense kernel sample (values times dx) with input/output weight exponents.
#[derive(Debug, Clone)]
pub struct OperatorSample {
    pub matrix: CMat,
    pub xs: Vec<f64>,
    pub sigma_in: f64,
    pub sigma_out: f64,
}

impl OperatorSample {
    pub fn new(matrix: CMat, xs: Vec<f64>, sigma_in: f64, sigma_out: f64) -> Result<Self> {
        if matrix.n_rows() != matrix.n_cols() || matrix.n_rows() != xs.len() {
            return Err(KgError::DimensionMismatch {
                expected: xs.len(),
                got: matrix.n_rows(),
            });
        }
        Ok(Self {
            matrix,
            xs,
            sigma_in,
            sigma_out,
        })
    }
}

/// Largest singular value of `D_{-sigma_out} K D_{-sigma_in}`,
/// `D_s = diag <x>^s`, by power iteration from the all-ones vector.
pub fn op_norm_weighted(sample: &OperatorSample) -> Result<f64> {
    let d_out: Vec<f64> = sample.xs.iter().map(|&x| weight(x, -sample.sigma_out)).collect();
    let d_in: Vec<f64> = sample.xs.iter().map(|&x| weight(x, -sample.sigma_in)).collect();
    let a = sample.matrix.scale_rows_cols(&d_out, &d_in);
    power_iteration_largest_sv(
        a.n_cols(),
        |x| a.matvec(x),
        |x| a.adj_matvec(x),
        1e-8,
        10_000,
    )
}

/// Dense blocks of a two-component operator (kernel values times dx) for
/// weighted `F_sigma -> F_{-sigma}` norm estimation.
///
/// The pair norm used here is the Hilbert-space version
/// `(||<x>^s psi||^2 + ||<x>^s psi'||^2 + ||<x>^s psidot||^2)^{1/2}`,
/// equivalent to the sum form within fixed constants, so fitted decay
/// exponents are unaffected.
pub struct KgOperatorSample {
    pub blocks: [CMat; 4],
    pub grid: GridSpec,
    pub derivative: DerivativeScheme,
}

/// Cholesky factors of the two Gram blocks of the weighted pair norm.
struct PairFactor {
    psi: Cholesky,
    dot: Cholesky,
}

fn derivative_matrix(grid: &GridSpec, scheme: DerivativeScheme) -> CMat {
    let n = grid.n_points();
    let columns: Vec<Vec<Complex64>> = par::map_range(n, |j| {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        let col = derivative(&GridFn::new(*grid, e).expect("unit vector"), scheme);
        col.values().to_vec()
    });
    CMat::from_fn(n, n, |i, j| columns[j][i])
}

fn pair_factor(grid: &GridSpec, sigma: f64, scheme: DerivativeScheme) -> Result<PairFactor> {
    let n = grid.n_points();
    let w2: Vec<f64> = (0..n).map(|j| weight(grid.x(j), sigma).powi(2)).collect();
    let deriv = derivative_matrix(grid, scheme);
    // G_psi = D^2 + d^H D^2 d
    let ones = vec![1.0; n];
    let d_weighted = deriv.scale_rows_cols(&w2, &ones);
    let mut g_psi = deriv.adjoint().matmul(&d_weighted);
    for j in 0..n {
        g_psi.set(j, j, g_psi.get(j, j) + Complex64::new(w2[j], 0.0));
    }
    let mut g_dot = CMat::zeros(n, n);
    for j in 0..n {
        g_dot.set(j, j, Complex64::new(w2[j], 0.0));
    }
    Ok(PairFactor {
        psi: Cholesky::factor(&g_psi)?,
        dot: Cholesky::factor(&g_dot)?,
    })
}

impl KgOperatorSample {
    /// Weighted operator norm `F_sigma -> F_{-sigma}` (Hilbertized norms)
    /// as the largest singular value of `L_out^H U L_in^{-H}`.
    pub fn f_norm(&self, sigma: f64) -> Result<f64> {
        let n = self.grid.n_points();
        let f_in = pair_factor(&self.grid, sigma, self.derivative)?;
        let f_out = pair_factor(&self.grid, -sigma, self.derivative)?;
        let apply_u = |v: &[Complex64]| -> Vec<Complex64> {
            let (a, b) = v.split_at(n);
            let mut out = self.blocks[0].matvec(a);
            let tmp = self.blocks[1].matvec(b);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += t;
            }
            let mut lower = self.blocks[2].matvec(a);
            let tmp = self.blocks[3].matvec(b);
            for (o, t) in lower.iter_mut().zip(&tmp) {
                *o += t;
            }
            out.extend(lower);
            out
        };
        let apply_u_adj = |v: &[Complex64]| -> Vec<Complex64> {
            let (a, b) = v.split_at(n);
            let mut out = self.blocks[0].adj_matvec(a);
            let tmp = self.blocks[2].adj_matvec(b);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += t;
            }
            let mut lower = self.blocks[1].adj_matvec(a);
            let tmp = self.blocks[3].adj_matvec(b);
            for (o, t) in lower.iter_mut().zip(&tmp) {
                *o += t;
            }
            out.extend(lower);
            out
        };
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            let (a, b) = v.split_at(n);
            let mut w = f_in.psi.solve_lower_adjoint(a);
            w.extend(f_in.dot.solve_lower_adjoint(b));
            let u = apply_u(&w);
            let (ua, ub) = u.split_at(n);
            let mut r = f_out.psi.apply_lower_adjoint(ua);
            r.extend(f_out.dot.apply_lower_adjoint(ub));
            r
        };
        let apply_adj = |v: &[Complex64]| -> Vec<Complex64> {
            let (a, b) = v.split_at(n);
            let mut y = f_out.psi.apply_lower(a);
            y.extend(f_out.dot.apply_lower(b));
            let z = apply_u_adj(&y);
            let (za, zb) = z.split_at(n);
            let mut x = f_in.psi.solve_lower(za);
            x.extend(f_in.dot.solve_lower(zb));
            x
        };
        power_iteration_largest_sv(2 * n, apply, apply_adj, 1e-8, 10_000)
    }
}

/// One row of the interpolation-inequality report.
#[derive(Debug, Clone, Copy)]
pub struct InterpRow {
    pub theta: f64,
    pub sigma: f64,
    pub norm: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct InterpReport {
    pub m0: f64,
    pub m1: f64,
    pub rows: Vec<InterpRow>,
    pub all_hold: bool,
}

/// Check `M(sigma(theta)) <= M0^{1-theta} M1^{theta} (1 + 1e-6)` for each
/// theta, with `sigma(theta) = (1-theta) sigma0 + theta sigma1` and `M`
/// produced by `op_builder`.
pub fn interp_check(
    mut op_builder: impl FnMut(f64) -> Result<f64>,
    sigma0: f64,
    sigma1: f64,
    thetas: &[f64],
) -> Result<InterpReport> {
    if sigma0 == sigma1 {
        return Err(KgError::Invalid("interpolation needs sigma0 != sigma1".into()));
    }
    let m0 = op_builder(sigma0)?;
    let m1 = op_builder(sigma1)?;
    let mut rows = Vec::with_capacity(thetas.len());
    let mut all_hold = true;
    for &theta in thetas {
        let sigma = (1.0 - theta) * sigma0 + theta * sigma1;
        let norm = op_builder(sigma)?;
        let bound = m0.powf(1.0 - theta) * m1.powf(theta) * (1.0 + 1e-6);
        let holds = norm <= bound;
        all_hold &= holds;
        rows.push(InterpRow {
            theta,
            sigma,
            norm,
            bound,
            holds,
        });
    }
    Ok(InterpReport {
        m0,
        m1,
        rows,
        all_hold,
    })
}

/// Families for the sup-over-p oscillatory experiments.
#[derive(Debug, Clone)]
pub enum OscVariant {
    /// `sup_p |Int band(k^2+m^2) w^j(k) e^{i(t w(k) + p k)} dk|` over a
    /// symmetric k-range.
    CompactBump { band: Cutoff, omega_power: i32, k_hi: f64 },
    /// `sup_p |Int_1^{k_hi} xi(k) k^{-alpha} e^{i(t w(k) + p k)} dk|`.
    HighEnergyTail { alpha: f64, k_hi: f64 },
}

impl OscVariant {
    fn k_range(&self) -> (f64, f64) {
        match *self {
            OscVariant::CompactBump { k_hi, .. } => (-k_hi, k_hi),
            OscVariant::HighEnergyTail { k_hi, .. } => (1.0, k_hi),
        }
    }

    fn amplitude(&self, m: f64) -> impl Fn(f64) -> Complex64 + Sync + '_ {
        let xi = Cutoff::XiHigh;
        move |k: f64| match *self {
            OscVariant::CompactBump {
                ref band,
                omega_power,
                ..
            } => {
                let w = (k * k + m * m).sqrt();
                Complex64::new(band.eval(k * k + m * m) * w.powi(omega_power), 0.0)
            }
            OscVariant::HighEnergyTail { alpha, .. } => {
                Complex64::new(xi.eval(k) * k.powf(-alpha), 0.0)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct OscSupReport {
    /// `(t, sup over the p-grid)` rows.
    pub rows: Vec<(f64, f64)>,
    pub fit: DecayFit,
}

/// For each `t`, take the sup over a p-grid of `|oscillatory integral|`, then
/// fit the decay. The p-grid spans `[-2t, 2t]` with spacing `pi / (2 k_hi)`
/// (band-limited in p by the k-support).
pub fn oscillatory_sup_check(
    variant: &OscVariant,
    m: f64,
    t_list: &[f64],
) -> Result<OscSupReport> {
    let (k_lo, k_hi) = variant.k_range();
    let k_abs = k_lo.abs().max(k_hi.abs());
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let n_nodes = (required_nodes(t, k_abs) * 6 / 5).max(512);
        let rule = QuadratureRule::trapezoid(n_nodes)?;
        let spacing = std::f64::consts::PI / (2.0 * k_hi);
        let p_count = (4.0 * t / spacing).ceil() as usize + 1;
        let amp = variant.amplitude(m);
        let sups = par::map_range(p_count, |i| {
            let p = -2.0 * t + i as f64 * spacing;
            oscillatory_integral(&amp, k_lo, k_hi, t, p, m, &rule).map(|v| v.norm())
        });
        let mut sup: f64 = 0.0;
        for s in sups {
            sup = sup.max(s?);
        }
        rows.push((t, sup));
    }
    let times: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fit = decay_fit(&times, &values)?;
    Ok(OscSupReport { rows, fit })
}
