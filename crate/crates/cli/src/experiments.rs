//! Experiment runners: each returns plot-ready CSV text, a list of JSON
//! result records, and a pass/fail verdict against its thresholds.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use kg1d::analysis::{
    decay_fit, interp_check, op_norm_weighted, oscillatory_sup_check, DecayFit, KgOperatorSample,
    OperatorSample, OscVariant,
};
use kg1d::born::{born_series, BornEngine};
use kg1d::cutoff::Cutoff;
use kg1d::fourier::DerivativeScheme;
use kg1d::free::{bj_operator_matrix, free_kernel, free_propagator_blocks, green_u, KernelEntry, Mass};
use kg1d::grid::{make_grid, GridFn, GridSpec, KGState};
use kg1d::leapfrog::{leapfrog_evolve, LaplacianScheme, StepperConfig};
use kg1d::norms::{weighted_norm_state, WeightedNormKind, WeightedSpace};
use kg1d::perturbed::{pc_operator, pc_project, SpectralEvolver};
use kg1d::potential::{sample_potential, PotentialSpec};
use kg1d::scattering::{resonance_check, scattering_coeffs, wronskians};
use kg1d::special::{required_nodes, QuadratureRule};

use crate::config::{Experiment, RunConfig};
use crate::rng::SplitMix64;

pub struct Outcome {
    pub csv: String,
    pub results: Vec<Value>,
    pub pass: bool,
}

fn mass_of(cfg: &RunConfig) -> Result<Mass> {
    Ok(Mass::new(cfg.mass)?)
}

fn grid_of(cfg: &RunConfig) -> Result<GridSpec> {
    Ok(make_grid(cfg.half_width, cfg.n_points, cfg.k_max, cfg.n_k)?)
}

fn data_state(cfg: &RunConfig, grid: GridSpec) -> KGState {
    let w2 = cfg.data_width * cfg.data_width;
    let k0 = cfg.data_k0;
    KGState::new(
        GridFn::from_real_fn(grid, move |x| (-x * x / w2).exp() * (k0 * x).cos()),
        GridFn::zeros(grid),
    )
    .expect("data state on one grid")
}

fn fit_record(name: &str, fit: &DecayFit, pass: bool) -> Value {
    json!({
        "experiment": name,
        "exponent": fit.exponent,
        "log_prefactor": fit.log_prefactor,
        "residual": fit.rms_residual,
        "t_window": [fit.t_window.0, fit.t_window.1],
        "n_samples": fit.n_samples,
        "pass": pass,
    })
}

pub fn run(cfg: &RunConfig, verbose: bool) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::FreeKernel => free_kernel_experiment(cfg),
        Experiment::FreeDecay => free_decay_experiment(cfg, verbose),
        Experiment::Scattering => scattering_experiment(cfg),
        Experiment::Resonance => resonance_experiment(cfg),
        Experiment::Evolve => evolve_experiment(cfg, verbose),
        Experiment::Born => born_experiment(cfg, verbose),
        Experiment::PerturbedDecay => perturbed_decay_experiment(cfg, verbose),
        Experiment::InterpCheck => interp_experiment(cfg),
        Experiment::OscCheck => osc_experiment(cfg, verbose),
    }
}

fn free_kernel_experiment(cfg: &RunConfig) -> Result<Outcome> {
    let m = mass_of(cfg)?;
    let t = cfg.t;
    let k_quad = 60.0f64.max(2.0 * cfg.k_max);
    let rule = QuadratureRule::trapezoid((required_nodes(t, k_quad) * 6 / 5).max(4096))?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut csv = String::from("x,y,r,quad_re,quad_im,reference,abs_err\n");
    let mut worst_rel: f64 = 0.0;
    for _ in 0..20 {
        let x = -10.0 + 20.0 * rng.next_f64();
        let r = 0.5 + 7.5 * rng.next_f64();
        let y = x + if rng.next_f64() < 0.5 { -r } else { r };
        let quad = free_kernel(t, x, y, &m, None, KernelEntry::E12, k_quad, &rule)?;
        let reference = green_u(t, r, &m);
        let err = (quad.re - reference).abs().max(quad.im.abs());
        if reference.abs() > 0.0 {
            worst_rel = worst_rel.max(err / reference.abs());
        }
        writeln!(csv, "{x},{y},{r},{},{},{reference},{err}", quad.re, quad.im).unwrap();
    }
    let mut worst_outside: f64 = 0.0;
    for i in 0..5 {
        let r = t + 2.0 + 2.0 * i as f64;
        let v = free_kernel(t, 0.0, r, &m, None, KernelEntry::E12, k_quad, &rule)?;
        worst_outside = worst_outside.max(v.norm());
        writeln!(csv, "0,{r},{r},{},{},0,{}", v.re, v.im, v.norm()).unwrap();
    }
    let pass = worst_rel <= 1e-3 && worst_outside < 1e-2;
    let results = vec![json!({
        "experiment": "free-kernel",
        "worst_relative_error": worst_rel,
        "worst_outside_cone": worst_outside,
        "pass": pass,
    })];
    Ok(Outcome { csv, results, pass })
}

fn free_decay_experiment(cfg: &RunConfig, verbose: bool) -> Result<Outcome> {
    let m = mass_of(cfg)?;
    let g = grid_of(cfg)?;
    if !cfg.potential.is_zero() {
        bail!("free-decay runs with potential=zero");
    }
    let band = Cutoff::band(cfg.band_lo, cfg.band_hi)?;
    let mut csv = String::from("t,norm\n");
    let mut values = vec![];
    for &t in &cfg.t_list {
        let rule = QuadratureRule::trapezoid((required_nodes(t, g.k_max()) * 6 / 5).max(4096))?;
        let blocks = free_propagator_blocks(t, &m, &band, &g, &rule)?;
        let sample = KgOperatorSample {
            blocks,
            grid: g,
            derivative: DerivativeScheme::Spectral,
        };
        let norm = sample.f_norm(cfg.sigma)?;
        if verbose {
            eprintln!("free-decay t={t}: norm {norm:.4e}");
        }
        writeln!(csv, "{t},{norm}").unwrap();
        values.push(norm);
    }
    let fit = decay_fit(&cfg.t_list, &values)?;
    let lo = cfg.fit_min.unwrap_or(-0.65);
    let hi = cfg.fit_max.unwrap_or(-0.40);
    let pass = fit.exponent >= lo && fit.exponent <= hi;
    Ok(Outcome {
        csv,
        results: vec![fit_record("free-decay", &fit, pass)],
        pass,
    })
}

fn scattering_experiment(cfg: &RunConfig) -> Result<Outcome> {
    let g = grid_of(cfg)?;
    let ks: Vec<f64> = (0..cfg.n_scatter)
        .map(|i| cfg.k_lo + (cfg.k_hi - cfg.k_lo) * i as f64 / (cfg.n_scatter - 1) as f64)
        .collect();
    let table = scattering_coeffs(&cfg.potential, &g, &ks)?;
    let mut csv_bytes = Vec::new();
    table.write_csv(&mut csv_bytes)?;
    let defect = table.max_unitarity_defect();
    let mut pass = defect < 1e-6;
    if cfg.potential.is_zero() {
        for i in 0..table.k.len() {
            pass &= (table.t[i] - Complex64::new(1.0, 0.0)).norm() < 1e-10
                && table.r_plus[i].norm() < 1e-10;
        }
    }
    let results = vec![json!({
        "experiment": "scattering",
        "max_unitarity_defect": defect,
        "n_k_points": table.k.len(),
        "pass": pass,
    })];
    Ok(Outcome {
        csv: String::from_utf8(csv_bytes).expect("csv is utf8"),
        results,
        pass,
    })
}

fn resonance_experiment(cfg: &RunConfig) -> Result<Outcome> {
    let m = mass_of(cfg)?;
    let g = grid_of(cfg)?;
    let report = resonance_check(&cfg.potential, &g, &m)?;
    let mut csv = String::from("k,ReW,ImW\n");
    for k in [1e-2, 5e-3, 2.5e-3] {
        let wr = wronskians(&cfg.potential, &g, k)?;
        writeln!(csv, "{k},{},{}", wr.w.re, wr.w.im).unwrap();
    }
    let results = vec![json!({
        "experiment": "resonance",
        "w0_abs": report.w0_abs,
        "threshold": report.threshold,
        "is_resonant": report.is_resonant,
        "pass": true,
    })];
    Ok(Outcome {
        csv,
        results,
        pass: true,
    })
}

fn evolve_experiment(cfg: &RunConfig, verbose: bool) -> Result<Outcome> {
    let m = mass_of(cfg)?;
    let g = grid_of(cfg)?;
    let band = Cutoff::band(cfg.band_lo, cfg.band_hi)?;
    let state = data_state(cfg, g);
    let ev = SpectralEvolver::new(&cfg.potential, &g, &m, &band)?;
    if verbose {
        eprintln!("evolve: psi table ready");
    }
    let filtered = ev.evolve(&state, 0.0)?;
    let spectral = ev.evolve(&state, cfg.t)?;
    let v = sample_potential(&cfg.potential, &g)?;
    let stepper = StepperConfig {
        dt: g.dx() / 16.0,
        laplacian: LaplacianScheme::Spectral,
        t_final: cfg.t,
    };
    let lf = leapfrog_evolve(&filtered, &stepper, &v, &m)?;
    let err = lf.state.sub(&spectral)?.l2_pair_norm();
    let pass = err < cfg.tol;
    let csv = kg1d::perturbed::state_csv(&spectral);
    let results = vec![json!({
        "experiment": "evolve",
        "t": cfg.t,
        "time_domain_gap": err,
        "tolerance": cfg.tol,
        "pass": pass,
    })];
    Ok(Outcome { csv, results, pass })
}

fn born_experiment(cfg: &RunConfig, verbose: bool) -> Result<Outcome> {
    let m = mass_of(cfg)?;
    let g = grid_of(cfg)?;
    let state = data_state(cfg, g);
    let norm_kind = WeightedNormKind::new(WeightedSpace::LinfPairSigma, cfg.sigma);
    if verbose {
        eprintln!("born: building engines and sweeping {} times", cfg.t_list.len());
    }
    let series = born_series(&cfg.t_list, &state, &cfg.potential, &m, &norm_kind)?;
    let mut csv_bytes = Vec::new();
    series.write_csv(&mut csv_bytes)?;
    let mut results = vec![];
    let mut pass = true;
    if cfg.potential.is_zero() {
        let collapse = series.norm_u1.iter().chain(&series.norm_u2).chain(&series.norm_w);
        let worst = collapse.cloned().fold(0.0f64, f64::max);
        pass &= worst == 0.0;
        results.push(json!({
            "experiment": "born",
            "max_correction_norm": worst,
            "pass": pass,
        }));
    } else {
        let fit = decay_fit(&cfg.t_list, &series.norm_w)?;
        let gate = cfg.fit_max.unwrap_or(-0.4);
        let ok = fit.exponent <= gate;
        pass &= ok;
        results.push(fit_record("born-remainder", &fit, ok));
        // gap ratio under halving the potential at the first listed time
        let t0 = cfg.t_list[0];
        let half = PotentialSpec::new(halve(cfg.potential.kind), cfg.potential.beta_claim)?;
        let gap_full = BornEngine::new(&cfg.potential, &g, &m)?.series_gap(&state, t0)?;
        let gap_half = BornEngine::new(&half, &g, &m)?.series_gap(&state, t0)?;
        let ratio = gap_full / gap_half;
        let ok = ratio >= 2.0;
        pass &= ok;
        results.push(json!({
            "experiment": "born-gap-halving",
            "t": t0,
            "gap": gap_full,
            "gap_half_potential": gap_half,
            "ratio": ratio,
            "pass": ok,
        }));
    }
    Ok(Outcome {
        csv: String::from_utf8(csv_bytes).expect("csv is utf8"),
        results,
        pass,
    })
}

fn halve(kind: kg1d::potential::PotentialKind) -> kg1d::potential::PotentialKind {
    use kg1d::potential::PotentialKind::*;
    match kind {
        Zero => Zero,
        SechSquared { amplitude } => SechSquared {
            amplitude: amplitude / 2.0,
        },
        Gaussian { amplitude, width } => Gaussian {
            amplitude: amplitude / 2.0,
            width,
        },
        Power { amplitude, beta } => Power {
            amplitude: amplitude / 2.0,
            beta,
        },
    }
}

fn perturbed_decay_experiment(cfg: &RunConfig, verbose: bool) -> Result<Outcome> {
    let m = mass_of(cfg)?;
    let g = grid_of(cfg)?;
    let band = Cutoff::band(cfg.band_lo, cfg.band_hi)?;
    let pc = pc_operator(&cfg.potential, &g, &m)?;
    let state = pc_project(&data_state(cfg, g), &pc)?;
    let ev = SpectralEvolver::new(&cfg.potential, &g, &m, &band)?;
    let kind = WeightedNormKind::new(WeightedSpace::FSigma, -cfg.sigma);
    let mut csv = String::from("t,norm\n");
    let mut values = vec![];
    for &t in &cfg.t_list {
        let norm = weighted_norm_state(&ev.evolve(&state, t)?, &kind);
        if verbose {
            eprintln!("perturbed-decay t={t}: norm {norm:.4e}");
        }
        writeln!(csv, "{t},{norm}").unwrap();
        values.push(norm);
    }
    let fit = decay_fit(&cfg.t_list, &values)?;
    let pass = if cfg.potential.is_zero() {
        fit.exponent >= cfg.fit_min.unwrap_or(-0.7)
    } else {
        fit.exponent <= cfg.fit_max.unwrap_or(-1.3)
    };
    Ok(Outcome {
        csv,
        results: vec![fit_record("perturbed-decay", &fit, pass)],
        pass,
    })
}

fn interp_experiment(cfg: &RunConfig) -> Result<Outcome> {
    let m = mass_of(cfg)?;
    let g = grid_of(cfg)?;
    let thetas = [0.25, 0.5, 0.75];
    let mut csv = String::from("family,theta,sigma,norm,bound,holds\n");
    let mut pass = true;
    let mut results = vec![];
    for &t in &cfg.t_list {
        let rule = QuadratureRule::trapezoid((required_nodes(t, g.k_max()) * 6 / 5).max(2048))?;
        let b0 = bj_operator_matrix(0, t, &m, &g, &rule)?;
        let builder = |sigma: f64| {
            op_norm_weighted(&OperatorSample::new(b0.clone(), g.xs(), sigma, sigma)?)
        };
        let report = interp_check(builder, 1.0, 2.0, &thetas)?;
        for row in &report.rows {
            writeln!(
                csv,
                "B0_t{t},{},{},{},{},{}",
                row.theta, row.sigma, row.norm, row.bound, row.holds
            )
            .unwrap();
        }
        pass &= report.all_hold;
        results.push(json!({
            "experiment": "interp-check",
            "family": format!("B0 at t={t}"),
            "m0": report.m0,
            "m1": report.m1,
            "pass": report.all_hold,
        }));
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let xs = g.xs();
    let mut diag_ok = true;
    for _ in 0..cfg.n_trials {
        let d: Vec<f64> = (0..g.n_points()).map(|_| 0.05 + 4.0 * rng.next_f64()).collect();
        let builder = |sigma: f64| -> kg1d::Result<f64> {
            Ok(d
                .iter()
                .zip(&xs)
                .map(|(&di, &x)| di * (1.0 + x * x).powf(-sigma))
                .fold(0.0, f64::max))
        };
        diag_ok &= interp_check(builder, 1.0, 2.0, &thetas)?.all_hold;
    }
    pass &= diag_ok;
    results.push(json!({
        "experiment": "interp-check",
        "family": format!("{} random diagonal kernels", cfg.n_trials),
        "pass": diag_ok,
    }));
    Ok(Outcome { csv, results, pass })
}

fn osc_experiment(cfg: &RunConfig, verbose: bool) -> Result<Outcome> {
    // uniform-curvature regime: the sup experiments use their own mass
    let m_osc = 4.0;
    let compact = OscVariant::CompactBump {
        band: Cutoff::band(4.0, 28.0)?,
        omega_power: 0,
        k_hi: 3.5,
    };
    let tail = OscVariant::HighEnergyTail {
        alpha: 3.0,
        k_hi: 12.0,
    };
    let mut csv = String::from("variant,t,sup\n");
    if verbose {
        eprintln!("osc-check: compact bump sweep");
    }
    let compact_report = oscillatory_sup_check(&compact, m_osc, &cfg.t_list)?;
    for &(t, s) in &compact_report.rows {
        writeln!(csv, "compact,{t},{s}").unwrap();
    }
    if verbose {
        eprintln!("osc-check: high-energy tail sweep");
    }
    let tail_report = oscillatory_sup_check(&tail, m_osc, &cfg.t_list)?;
    for &(t, s) in &tail_report.rows {
        writeln!(csv, "tail,{t},{s}").unwrap();
    }
    let gate = cfg.fit_max.unwrap_or(-0.4);
    let pass = compact_report.fit.exponent <= gate;
    let results = vec![
        fit_record("osc-check-compact", &compact_report.fit, pass),
        json!({
            "experiment": "osc-check-tail",
            "exponent": tail_report.fit.exponent,
            "residual": tail_report.fit.rms_residual,
            "gate": "reported only: pre-asymptotic below t ~ 20, see README",
            "pass": Value::Null,
        }),
    ];
    Ok(Outcome { csv, results, pass })
}

