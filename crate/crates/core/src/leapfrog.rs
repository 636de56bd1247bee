//! Independent time-domain Klein-Gordon solver (leapfrog / Stoermer-Verlet),
//! used to cross-validate the spectral evolutions.
//!
//! Scheme: `psi^{n+1} = 2 psi^n - psi^{n-1} + dt^2 (Lap - m^2 + V) psi^n`,
//! started with a Taylor step from `(psi, psidot)`; the returned `psidot` is
//! the centered difference at the final level. The half-step quadratic form
//! `|d psi/dt|^2 + <A psi^{n+1}, psi^n>` with `A = -Lap + m^2 - V` is an
//! exact invariant of the scheme and is reported for drift monitoring.

use num_complex::Complex64;

use crate::error::{KgError, Result};
use crate::fourier::{dft_forward, dft_inverse_unnormalized, dft_wavenumber};
use crate::grid::{GridFn, GridSpec, KGState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianScheme {
    Spectral,
    Fd2,
}

#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub dt: f64,
    pub laplacian: LaplacianScheme,
    pub t_final: f64,
}

#[derive(Debug, Clone)]
pub struct LeapfrogResult {
    pub state: KGState,
    pub steps: usize,
    pub energy_initial: f64,
    pub energy_final: f64,
}

fn laplacian(values: &[Complex64], grid: &GridSpec, scheme: LaplacianScheme) -> Vec<Complex64> {
    let n = grid.n_points();
    match scheme {
        LaplacianScheme::Spectral => {
            let mut buf = values.to_vec();
            dft_forward(&mut buf);
            for (i, v) in buf.iter_mut().enumerate() {
                let k = dft_wavenumber(i, n, grid.dx());
                *v *= -k * k;
            }
            dft_inverse_unnormalized(&mut buf);
            let s = 1.0 / n as f64;
            buf.into_iter().map(|z| z * s).collect()
        }
        LaplacianScheme::Fd2 => {
            let inv = 1.0 / (grid.dx() * grid.dx());
            (0..n)
                .map(|j| (values[(j + 1) % n] - 2.0 * values[j] + values[(j + n - 1) % n]) * inv)
                .collect()
        }
    }
}

fn half_step_energy(
    prev: &[Complex64],
    next: &[Complex64],
    grid: &GridSpec,
    scheme: LaplacianScheme,
    v: &[f64],
    m2: f64,
    dt: f64,
) -> f64 {
    let dx = grid.dx();
    let lap_next = laplacian(next, grid, scheme);
    let mut kinetic = 0.0;
    let mut form = 0.0;
    for j in 0..prev.len() {
        kinetic += ((next[j] - prev[j]) / dt).norm_sqr();
        // Re <A psi^{n+1}, psi^n>, A = -Lap + m^2 - V
        form += ((-lap_next[j] + (m2 - v[j]) * next[j]) * prev[j].conj()).re;
    }
    (kinetic + form) * dx
}

/// Evolve `state` to `cfg.t_final`, where `v` holds real potential samples.
///
/// `dt` is shrunk to divide `t_final` exactly. Norm growth beyond 10x the
/// initial size aborts with a suggested smaller step.
pub fn leapfrog_evolve(
    state: &KGState,
    cfg: &StepperConfig,
    v: &GridFn,
    m: &crate::free::Mass,
) -> Result<LeapfrogResult> {
    let grid = *state.grid();
    if v.grid() != &grid {
        return Err(KgError::GridMismatch);
    }
    if !(cfg.dt > 0.0) {
        return Err(KgError::Invalid(format!("dt = {} must be positive", cfg.dt)));
    }
    if cfg.dt > 0.5 * grid.dx() {
        return Err(KgError::Invalid(format!(
            "dt = {} exceeds the stability margin 0.5 dx = {}",
            cfg.dt,
            0.5 * grid.dx()
        )));
    }
    if cfg.t_final < 0.0 {
        return Err(KgError::Invalid("t_final must be nonnegative".into()));
    }
    if cfg.t_final == 0.0 {
        return Ok(LeapfrogResult {
            state: state.clone(),
            steps: 0,
            energy_initial: 0.0,
            energy_final: 0.0,
        });
    }
    let steps = (cfg.t_final / cfg.dt).ceil() as usize;
    let dt = cfg.t_final / steps as f64;
    let m2 = m.value() * m.value();
    let vr: Vec<f64> = v.values().iter().map(|z| z.re).collect();
    let n = grid.n_points();

    let apply_k = |psi: &[Complex64]| -> Vec<Complex64> {
        let lap = laplacian(psi, &grid, cfg.laplacian);
        (0..n)
            .map(|j| lap[j] + (vr[j] - m2) * psi[j])
            .collect()
    };

    let psi0: Vec<Complex64> = state.psi.values().to_vec();
    let dot0: Vec<Complex64> = state.psidot.values().to_vec();
    let norm0 = state.psi.l2_norm() + state.psidot.l2_norm();

    // Taylor start: psi^1 = psi^0 + dt psidot^0 + dt^2/2 K psi^0
    let k0 = apply_k(&psi0);
    let mut prev = psi0.clone();
    let mut cur: Vec<Complex64> = (0..n)
        .map(|j| psi0[j] + dt * dot0[j] + 0.5 * dt * dt * k0[j])
        .collect();

    let energy_initial = half_step_energy(&prev, &cur, &grid, cfg.laplacian, &vr, m2, dt);

    // march to level `steps + 1` so psidot at `steps` is centered
    let mut stored_prev_at_final: Option<Vec<Complex64>> = None;
    for level in 1..=steps {
        if level == steps {
            stored_prev_at_final = Some(prev.clone());
        }
        let kc = apply_k(&cur);
        let next: Vec<Complex64> = (0..n)
            .map(|j| 2.0 * cur[j] - prev[j] + dt * dt * kc[j])
            .collect();
        prev = cur;
        cur = next;
        if level % 64 == 0 {
            let norm = (prev.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
            if norm > 10.0 * (norm0 + 1e-30) {
                return Err(KgError::Instability {
                    suggested_dt: dt / 2.0,
                });
            }
        }
    }
    // here `prev` is level `steps`, `cur` is level `steps + 1`
    let before = stored_prev_at_final.expect("steps >= 1");
    let psidot_final: Vec<Complex64> = (0..n)
        .map(|j| (cur[j] - before[j]) / (2.0 * dt))
        .collect();
    let energy_final = half_step_energy(&before, &prev, &grid, cfg.laplacian, &vr, m2, dt);

    Ok(LeapfrogResult {
        state: KGState {
            psi: GridFn::new(grid, prev)?,
            psidot: GridFn::new(grid, psidot_final)?,
        },
        steps,
        energy_initial,
        energy_final,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::{evolve_free, Mass};
    use crate::grid::make_grid;
    use crate::potential::{sample_potential, PotentialSpec};

    fn m1() -> Mass {
        Mass::new(1.0).unwrap()
    }

    fn smooth_state(g: crate::grid::GridSpec) -> KGState {
        KGState::new(
            GridFn::from_real_fn(g, |x| (-x * x / 2.0).exp()),
            GridFn::from_real_fn(g, |x| 0.3 * (-x * x / 2.0).exp() * x),
        )
        .unwrap()
    }

    #[test]
    fn identity_at_zero_time() {
        let g = make_grid(20.0, 128, 8.0, 65).unwrap();
        let s = smooth_state(g);
        let v = sample_potential(&PotentialSpec::zero(), &g).unwrap();
        let cfg = StepperConfig {
            dt: g.dx() / 4.0,
            laplacian: LaplacianScheme::Spectral,
            t_final: 0.0,
        };
        let out = leapfrog_evolve(&s, &cfg, &v, &m1()).unwrap();
        assert_eq!(out.steps, 0);
        assert!(out.state.sub(&s).unwrap().l2_pair_norm() == 0.0);
    }

    #[test]
    fn matches_free_flow() {
        // spectral Laplacian, dt = dx/4, t = 20: difference below 1e-3
        // (the phase error t w^3 dt^2 / 24 wants low-frequency data here)
        let g = make_grid(40.0, 1024, 8.0, 65).unwrap();
        let s = KGState::new(
            GridFn::from_real_fn(g, |x| (-x * x / 8.0).exp()),
            GridFn::from_real_fn(g, |x| 0.3 * (-x * x / 8.0).exp()),
        )
        .unwrap();
        let v = sample_potential(&PotentialSpec::zero(), &g).unwrap();
        let cfg = StepperConfig {
            dt: g.dx() / 4.0,
            laplacian: LaplacianScheme::Spectral,
            t_final: 20.0,
        };
        let out = leapfrog_evolve(&s, &cfg, &v, &m1()).unwrap();
        let exact = evolve_free(&s, 20.0, &m1(), None);
        let err = out.state.sub(&exact).unwrap().l2_pair_norm();
        assert!(err < 1e-3, "leapfrog vs free flow: {err}");
    }

    #[test]
    fn second_order_convergence() {
        let g = make_grid(40.0, 512, 8.0, 65).unwrap();
        let s = smooth_state(g);
        let v = sample_potential(&PotentialSpec::zero(), &g).unwrap();
        let exact = evolve_free(&s, 10.0, &m1(), None);
        let err_of = |dt: f64| {
            let cfg = StepperConfig {
                dt,
                laplacian: LaplacianScheme::Spectral,
                t_final: 10.0,
            };
            leapfrog_evolve(&s, &cfg, &v, &m1())
                .unwrap()
                .state
                .sub(&exact)
                .unwrap()
                .l2_pair_norm()
        };
        let ratio = err_of(g.dx() / 8.0) / err_of(g.dx() / 16.0);
        assert!((3.0..5.0).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn discrete_energy_flat_over_thousand_steps() {
        let g = make_grid(20.0, 256, 8.0, 65).unwrap();
        let s = smooth_state(g);
        let pot = PotentialSpec::sech_squared(-0.2);
        let v = sample_potential(&pot, &g).unwrap();
        let dt = g.dx() / 4.0;
        let cfg = StepperConfig {
            dt,
            laplacian: LaplacianScheme::Spectral,
            t_final: dt * 1000.0,
        };
        let out = leapfrog_evolve(&s, &cfg, &v, &m1()).unwrap();
        assert_eq!(out.steps, 1000);
        let drift = (out.energy_final - out.energy_initial).abs() / out.energy_initial.abs();
        assert!(drift < 1e-6, "energy drift {drift}");
    }

    #[test]
    fn finite_propagation_speed() {
        // fd2 transport is subluminal at every grid wavenumber, so a smooth
        // compact bump stays inside |x| <= support + t + 2 to high precision
        let g = make_grid(48.0, 1024, 8.0, 65).unwrap();
        let bump = |x: f64| crate::cutoff::smoothstep((5.0 - x.abs()) / 3.0);
        let s = KGState::new(GridFn::from_real_fn(g, bump), GridFn::zeros(g)).unwrap();
        let v = sample_potential(&PotentialSpec::zero(), &g).unwrap();
        let t = 20.0;
        let cfg = StepperConfig {
            dt: g.dx() / 4.0,
            laplacian: LaplacianScheme::Fd2,
            t_final: t,
        };
        let out = leapfrog_evolve(&s, &cfg, &v, &m1()).unwrap();
        let mut leak: f64 = 0.0;
        for j in 0..g.n_points() {
            if g.x(j).abs() > 5.0 + t + 2.0 {
                leak = leak.max(out.state.psi.values()[j].norm());
            }
        }
        assert!(leak < 1e-8, "leak outside the light cone: {leak}");
    }

    #[test]
    fn instability_detected() {
        let g = make_grid(20.0, 128, 8.0, 65).unwrap();
        let s = smooth_state(g);
        // a well deep enough to push an eigenvalue below -m^2 makes the
        // true flow grow exponentially, which the norm guard must catch
        let deep = PotentialSpec::sech_squared(6.0);
        let v = sample_potential(&deep, &g).unwrap();
        let cfg = StepperConfig {
            dt: g.dx() / 4.0,
            laplacian: LaplacianScheme::Spectral,
            t_final: 40.0,
        };
        match leapfrog_evolve(&s, &cfg, &v, &m1()) {
            Err(KgError::Instability { suggested_dt }) => {
                assert!(suggested_dt < g.dx() / 4.0);
            }
            other => panic!("expected instability, got {other:?}"),
        }
        // over-large dt rejected up front
        let bad = StepperConfig {
            dt: g.dx(),
            laplacian: LaplacianScheme::Fd2,
            t_final: 1.0,
        };
        let v0 = sample_potential(&PotentialSpec::zero(), &g).unwrap();
        assert!(leapfrog_evolve(&s, &bad, &v0, &m1()).is_err());
    }

    #[test]
    fn fd2_and_spectral_agree_for_smooth_data() {
        let g = make_grid(40.0, 1024, 8.0, 65).unwrap();
        let s = smooth_state(g);
        let pot = PotentialSpec::sech_squared(-0.4);
        let v = sample_potential(&pot, &g).unwrap();
        let run = |scheme| {
            let cfg = StepperConfig {
                dt: g.dx() / 8.0,
                laplacian: scheme,
                t_final: 5.0,
            };
            leapfrog_evolve(&s, &cfg, &v, &m1()).unwrap().state
        };
        let a = run(LaplacianScheme::Spectral);
        let b = run(LaplacianScheme::Fd2);
        let err = a.sub(&b).unwrap().l2_pair_norm();
        assert!(err < 5e-3, "scheme disagreement {err}");
    }
}
