//! Born expansion of the high-energy flow `U(t) = e^{-itK} zeta(K^2)`:
//! the free term, the first and second potential-order terms through the
//! convolution representation, and the remainder by subtraction.
//!
//! The convolution `Psi_{j+1}(t) = -i Int_0^t U_0(t-tau) V Psi_j(tau) dtau`
//! (the Duhamel sign for the generator split `K = K_0 + V-matrix`) is
//! accumulated with a composite trapezoid rule in `tau` driven by the exact
//! semigroup recurrence `T_{i+1} = U_0(dt) (T_i + dt/2 G_i) + dt/2 G_{i+1}`,
//! so a whole time sweep costs one FFT round per step. The sign is validated
//! operationally: adding each term shrinks the residual against the full
//! evolution by one more power of V.

use num_complex::Complex64;

use crate::cutoff::Cutoff;
use crate::error::{KgError, Result};
use crate::fourier::{dft_forward, dft_inverse_unnormalized, dft_wavenumber};
use crate::free::{mt_matrix, Mass};
use crate::grid::{GridFn, GridSpec, KGState};
use crate::norms::{weighted_norm_state, WeightedNormKind};
use crate::perturbed::SpectralEvolver;
use crate::potential::{sample_potential, PotentialSpec};

/// `V(x)` as the generator perturbation: `(psi, psidot) -> (0, i V psi)`.
pub fn v_matrix_apply(state: &KGState, v: &GridFn) -> Result<KGState> {
    if state.grid() != v.grid() {
        return Err(KgError::GridMismatch);
    }
    let i = Complex64::new(0.0, 1.0);
    let psi = state.psi.values();
    let second: Vec<Complex64> = (0..psi.len()).map(|j| i * v.values()[j] * psi[j]).collect();
    Ok(KGState {
        psi: GridFn::zeros(*state.grid()),
        psidot: GridFn::new(*state.grid(), second)?,
    })
}

/// Two-component spectral coefficients of a state (DFT bin order).
struct HatState {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl HatState {
    fn zero(n: usize) -> Self {
        HatState {
            a: vec![Complex64::new(0.0, 0.0); n],
            b: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    fn of(state: &KGState) -> Self {
        let mut a = state.psi.values().to_vec();
        let mut b = state.psidot.values().to_vec();
        dft_forward(&mut a);
        dft_forward(&mut b);
        HatState { a, b }
    }

    fn to_state(&self, grid: &GridSpec) -> Result<KGState> {
        let n = grid.n_points();
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        dft_inverse_unnormalized(&mut a);
        dft_inverse_unnormalized(&mut b);
        let s = 1.0 / n as f64;
        Ok(KGState {
            psi: GridFn::new(*grid, a.into_iter().map(|z| z * s).collect())?,
            psidot: GridFn::new(*grid, b.into_iter().map(|z| z * s).collect())?,
        })
    }
}

/// Prepared Born machinery for one `(V, grid, m)` triple: the zeta-band
/// spectral evolvers (perturbed and free) plus the FFT-side multipliers.
pub struct BornEngine {
    pub grid: GridSpec,
    pub mass: Mass,
    v_samples: GridFn,
    zeta_dft: Vec<f64>,
    evolvers: Option<Box<(SpectralEvolver, SpectralEvolver)>>,
}

/// `zeta(k^2 + m^2)` with a smooth roll-off on `[0.75 k_max, k_max]`.
fn band_value(k: f64, m: f64, k_max: f64) -> f64 {
    let zeta = Cutoff::ZetaHigh { m };
    zeta.eval(k * k + m * m) * crate::cutoff::smoothstep(4.0 * (k_max - k.abs()) / k_max)
}

impl BornEngine {
    pub fn new(pot: &PotentialSpec, grid: &GridSpec, m: &Mass) -> Result<Self> {
        let mut engine = Self::new_terms_only(pot, grid, m)?;
        let band_samples: Vec<f64> = grid
            .k_nodes()
            .iter()
            .map(|&k| band_value(k, m.value(), grid.k_max()))
            .collect();
        engine.evolvers = Some(Box::new((
            SpectralEvolver::with_band_samples(pot, grid, m, band_samples.clone())?,
            SpectralEvolver::with_band_samples(&PotentialSpec::zero(), grid, m, band_samples)?,
        )));
        Ok(engine)
    }

    /// The engine's high-energy band: `zeta(k^2+m^2)` rolled off smoothly on
    /// `[0.75 k_max, k_max]`. Both the FFT side and the quadrature side use
    /// this same multiplier, so the subtraction defining the remainder never
    /// sees a band mismatch (V-scattering moves spectral content toward the
    /// truncation edge at first order in V).
    pub fn band_at(&self, k: f64) -> f64 {
        band_value(k, self.mass.value(), self.grid.k_max())
    }

    /// Engine without the quadrature evolvers: supports `terms` only. Useful
    /// for potentials whose tails are too fat for the Jost box condition.
    pub fn new_terms_only(pot: &PotentialSpec, grid: &GridSpec, m: &Mass) -> Result<Self> {
        let v_samples = sample_potential(pot, grid)?;
        let n = grid.n_points();
        let zeta_dft: Vec<f64> = (0..n)
            .map(|i| {
                let k = dft_wavenumber(i, n, grid.dx());
                band_value(k, m.value(), grid.k_max())
            })
            .collect();
        Ok(Self {
            grid: *grid,
            mass: *m,
            v_samples,
            zeta_dft,
            evolvers: None,
        })
    }

    fn evolver_pair(&self) -> Result<&(SpectralEvolver, SpectralEvolver)> {
        self.evolvers
            .as_deref()
            .ok_or_else(|| KgError::Invalid("engine built terms-only; no spectral evolvers".into()))
    }

    pub fn v_samples(&self) -> &GridFn {
        &self.v_samples
    }

    /// `U_0(t) = e^{-itK_0} zeta(K_0^2)` through the FFT diagonalization,
    /// with the engine's tapered band.
    pub fn free_term_fft(&self, state: &KGState, t: f64) -> KGState {
        let n = self.grid.n_points();
        let mut hat = HatState::of(state);
        for j in 0..n {
            let k = dft_wavenumber(j, n, self.grid.dx());
            let mt = mt_matrix(k, t, &self.mass);
            let (u, v) = mt.mul_vec((hat.a[j], hat.b[j]));
            hat.a[j] = u * self.zeta_dft[j];
            hat.b[j] = v * self.zeta_dft[j];
        }
        hat.to_state(&self.grid).expect("free step preserves shape")
    }

    /// `G = zeta(K_0^2) V Psi` in spectral coefficients, with `Psi` given by
    /// its psi-component spectral coefficients.
    fn zeta_v_of(&self, psi_hat: &[Complex64]) -> HatState {
        let n = self.grid.n_points();
        let mut psi_x = psi_hat.to_vec();
        dft_inverse_unnormalized(&mut psi_x);
        let s = 1.0 / n as f64;
        let i = Complex64::new(0.0, 1.0);
        let mut b: Vec<Complex64> = (0..n)
            .map(|j| i * self.v_samples.values()[j] * psi_x[j] * s)
            .collect();
        dft_forward(&mut b);
        for (j, z) in b.iter_mut().enumerate() {
            *z *= self.zeta_dft[j];
        }
        HatState {
            a: vec![Complex64::new(0.0, 0.0); n],
            b,
        }
    }

    fn free_step(&self, state: &mut HatState, dt: f64) {
        let n = self.grid.n_points();
        for j in 0..n {
            let k = dft_wavenumber(j, n, self.grid.dx());
            let mt = mt_matrix(k, dt, &self.mass);
            let (u, v) = mt.mul_vec((state.a[j], state.b[j]));
            state.a[j] = u;
            state.b[j] = v;
        }
    }

    /// Trapezoid step count for the tau integral: `dt <= min(0.005, t/64)`.
    /// The integrand carries beat frequencies up to ~2 w(k), so the step must
    /// stay far below the outer time scale: the remainder is a subtraction,
    /// and the dt^2 bias in Psi_2 must sit under the remainder's own size.
    fn steps_for(t: f64) -> usize {
        ((t / (0.005f64).min(t / 64.0)).ceil() as usize).max(64)
    }

    /// The three Born terms `(Psi_1, Psi_2, Psi_3)(t)` from one tau sweep:
    /// `Psi_1 = U_0(t) Psi_0`, `Psi_{j+1} = i Int_0^t U_0(t-tau) V Psi_j dtau`.
    pub fn terms(&self, psi0: &KGState, t: f64) -> Result<(KGState, KGState, KGState)> {
        if psi0.grid() != &self.grid {
            return Err(KgError::GridMismatch);
        }
        if !(t > 0.0) {
            return Err(KgError::Invalid("born terms need t > 0".into()));
        }
        let n_steps = Self::steps_for(t);
        let dt = t / n_steps as f64;
        let n = self.grid.n_points();
        let minus_i = Complex64::new(0.0, -1.0);

        // Psi_1 in spectral coefficients, stepped exactly
        let mut psi1 = HatState::of(psi0);
        for (j, (a, b)) in psi1.a.iter_mut().zip(psi1.b.iter_mut()).enumerate() {
            *a *= self.zeta_dft[j];
            *b *= self.zeta_dft[j];
        }
        let mut t2 = HatState::zero(n);
        let mut t3 = HatState::zero(n);

        let psi2_of = |t2: &HatState| -> Vec<Complex64> {
            t2.a.iter().map(|z| minus_i * z).collect()
        };
        let mut g1 = self.zeta_v_of(&psi1.a); // zeta V Psi_1 at tau = 0
        let mut g2 = self.zeta_v_of(&psi2_of(&t2)); // zero at tau = 0

        for _ in 0..n_steps {
            // close the trapezoid panel: T <- U0(dt)(T + dt/2 G_i), then add
            // the new endpoint dt/2 G_{i+1}; the chain-3 source must see the
            // completed Psi_2 at tau_{i+1}
            for j in 0..n {
                t2.a[j] += 0.5 * dt * g1.a[j];
                t2.b[j] += 0.5 * dt * g1.b[j];
                t3.a[j] += 0.5 * dt * g2.a[j];
                t3.b[j] += 0.5 * dt * g2.b[j];
            }
            self.free_step(&mut t2, dt);
            self.free_step(&mut t3, dt);
            self.free_step(&mut psi1, dt);
            g1 = self.zeta_v_of(&psi1.a);
            for j in 0..n {
                t2.a[j] += 0.5 * dt * g1.a[j];
                t2.b[j] += 0.5 * dt * g1.b[j];
            }
            g2 = self.zeta_v_of(&psi2_of(&t2));
            for j in 0..n {
                t3.a[j] += 0.5 * dt * g2.a[j];
                t3.b[j] += 0.5 * dt * g2.b[j];
            }
        }
        let psi2 = HatState {
            a: t2.a.iter().map(|z| minus_i * z).collect(),
            b: t2.b.iter().map(|z| minus_i * z).collect(),
        };
        let psi3 = HatState {
            a: t3.a.iter().map(|z| minus_i * z).collect(),
            b: t3.b.iter().map(|z| minus_i * z).collect(),
        };
        Ok((
            psi1.to_state(&self.grid)?,
            psi2.to_state(&self.grid)?,
            psi3.to_state(&self.grid)?,
        ))
    }

    /// Full zeta-band evolution through the spectral representation.
    pub fn full_evolution(&self, psi0: &KGState, t: f64) -> Result<KGState> {
        self.evolver_pair()?.0.evolve(psi0, t)
    }

    /// `U_0(t) Psi_0` through the same quadrature path as the full evolution,
    /// so the two cancel identically when `V = 0`.
    pub fn free_term_quadrature(&self, psi0: &KGState, t: f64) -> Result<KGState> {
        self.evolver_pair()?.1.evolve(psi0, t)
    }

    /// Remainder `W(t) Psi_0 = U(t) Psi_0 - Psi_1 - Psi_2 - Psi_3`, with the
    /// free term taken through the quadrature path.
    pub fn remainder(&self, psi0: &KGState, t: f64) -> Result<KGState> {
        let full = self.full_evolution(psi0, t)?;
        let u0 = self.free_term_quadrature(psi0, t)?;
        let (_, psi2, psi3) = self.terms(psi0, t)?;
        full.sub(&u0)?.sub(&psi2)?.sub(&psi3)
    }

    /// Gap of the truncated series against the full evolution,
    /// `||Psi_1 + Psi_2 + Psi_3 - U(t) Psi_0||` in L^2 (+) L^2.
    pub fn series_gap(&self, psi0: &KGState, t: f64) -> Result<f64> {
        Ok(self.remainder(psi0, t)?.l2_pair_norm())
    }
}

/// One-shot Born term `Psi_{j+1}(t)` for `j in {1, 2}`.
pub fn born_term(
    j: usize,
    t: f64,
    psi0: &KGState,
    pot: &PotentialSpec,
    m: &Mass,
) -> Result<KGState> {
    if !(1..=2).contains(&j) {
        return Err(KgError::Invalid(format!("born term index {j} not in 1..=2")));
    }
    let engine = BornEngine::new(pot, psi0.grid(), m)?;
    let (_, psi2, psi3) = engine.terms(psi0, t)?;
    Ok(if j == 1 { psi2 } else { psi3 })
}

/// One-shot remainder (prefer [`BornEngine`] for sweeps over several times).
pub fn born_remainder(
    t: f64,
    psi0: &KGState,
    pot: &PotentialSpec,
    m: &Mass,
) -> Result<KGState> {
    BornEngine::new(pot, psi0.grid(), m)?.remainder(psi0, t)
}

/// Weighted norms of the four Born pieces along a time sweep.
#[derive(Debug, Clone)]
pub struct BornSeries {
    pub times: Vec<f64>,
    pub norm_u0: Vec<f64>,
    pub norm_u1: Vec<f64>,
    pub norm_u2: Vec<f64>,
    pub norm_w: Vec<f64>,
}

impl BornSeries {
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,norm_U0,norm_U1,norm_U2,norm_W")?;
        for i in 0..self.times.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                self.times[i], self.norm_u0[i], self.norm_u1[i], self.norm_u2[i], self.norm_w[i]
            )?;
        }
        Ok(())
    }
}

pub fn born_series(
    times: &[f64],
    psi0: &KGState,
    pot: &PotentialSpec,
    m: &Mass,
    norm: &WeightedNormKind,
) -> Result<BornSeries> {
    let engine = BornEngine::new(pot, psi0.grid(), m)?;
    let mut series = BornSeries {
        times: times.to_vec(),
        norm_u0: vec![],
        norm_u1: vec![],
        norm_u2: vec![],
        norm_w: vec![],
    };
    for &t in times {
        let (_, psi2, psi3) = engine.terms(psi0, t)?;
        let u0 = engine.free_term_quadrature(psi0, t)?;
        let full = engine.full_evolution(psi0, t)?;
        let w = full.sub(&u0)?.sub(&psi2)?.sub(&psi3)?;
        series.norm_u0.push(weighted_norm_state(&u0, norm));
        series.norm_u1.push(weighted_norm_state(&psi2, norm));
        series.norm_u2.push(weighted_norm_state(&psi3, norm));
        series.norm_w.push(weighted_norm_state(&w, norm));
    }
    Ok(series)
}
