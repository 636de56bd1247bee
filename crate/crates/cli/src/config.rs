//! Flat key=value experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use kg1d::potential::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    FreeKernel,
    FreeDecay,
    Scattering,
    Resonance,
    Evolve,
    Born,
    PerturbedDecay,
    InterpCheck,
    OscCheck,
}

impl Experiment {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "free-kernel" => Experiment::FreeKernel,
            "free-decay" => Experiment::FreeDecay,
            "scattering" => Experiment::Scattering,
            "resonance" => Experiment::Resonance,
            "evolve" => Experiment::Evolve,
            "born" => Experiment::Born,
            "perturbed-decay" => Experiment::PerturbedDecay,
            "interp-check" => Experiment::InterpCheck,
            "osc-check" => Experiment::OscCheck,
            other => bail!(
                "unknown experiment '{other}' (expected one of free-kernel, free-decay, \
                 scattering, resonance, evolve, born, perturbed-decay, interp-check, osc-check)"
            ),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::FreeKernel => "free-kernel",
            Experiment::FreeDecay => "free-decay",
            Experiment::Scattering => "scattering",
            Experiment::Resonance => "resonance",
            Experiment::Evolve => "evolve",
            Experiment::Born => "born",
            Experiment::PerturbedDecay => "perturbed-decay",
            Experiment::InterpCheck => "interp-check",
            Experiment::OscCheck => "osc-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully resolved run configuration (defaults filled in per experiment).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub mass: f64,
    pub potential: PotentialSpec,
    pub half_width: f64,
    pub n_points: usize,
    pub k_max: f64,
    pub n_k: usize,
    pub sigma: f64,
    pub t_list: Vec<f64>,
    pub t: f64,
    pub seed: u64,
    pub out_dir: String,
    pub band_lo: f64,
    pub band_hi: f64,
    pub data_width: f64,
    pub data_k0: f64,
    pub k_lo: f64,
    pub k_hi: f64,
    pub n_scatter: usize,
    pub fit_min: Option<f64>,
    pub fit_max: Option<f64>,
    pub tol: f64,
    pub n_trials: usize,
    /// echo of every resolved key for the summary
    pub echo: BTreeMap<String, String>,
}

fn parse_potential(spec: &str, beta_claim: Option<f64>) -> Result<PotentialSpec> {
    let (kind, args) = match spec.split_once(':') {
        Some((k, a)) => (k, a),
        None => (spec, ""),
    };
    let nums: Vec<f64> = if args.is_empty() {
        vec![]
    } else {
        args.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("potential parameter '{s}': {e}")))
            .collect::<Result<_>>()?
    };
    let base = match (kind, nums.as_slice()) {
        ("zero", []) => PotentialSpec::zero(),
        ("sech2", [a]) => PotentialSpec::sech_squared(*a),
        ("gaussian", [a, w]) => PotentialSpec::gaussian(*a, *w)?,
        ("power", [a, b]) => PotentialSpec::power(*a, *b)?,
        _ => bail!(
            "bad potential '{spec}' (expected zero | sech2:<amp> | gaussian:<amp>,<width> | power:<amp>,<beta>)"
        ),
    };
    Ok(match beta_claim {
        Some(b) => PotentialSpec::new(base.kind, b)?,
        None => base,
    })
}

fn parse_t_list(spec: &str) -> Result<Vec<f64>> {
    if let Some(rest) = spec.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            bail!("t_list log form is log:<from>,<to>,<count>");
        }
        let a: f64 = parts[0].trim().parse()?;
        let b: f64 = parts[1].trim().parse()?;
        let n: usize = parts[2].trim().parse()?;
        if !(a > 0.0 && b > a && n >= 2) {
            bail!("t_list log form needs 0 < from < to and count >= 2");
        }
        return Ok((0..n)
            .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
            .collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("t_list entry '{s}': {e}")))
        .collect()
}

/// Parse the flat key=value text; '#' starts a comment, blank lines skipped,
/// duplicate and unknown keys rejected.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key=value, got '{line}'", idx + 1))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            bail!("line {}: duplicate key '{key}'", idx + 1);
        }
    }
    Ok(map)
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "mass",
    "potential",
    "beta_claim",
    "L",
    "N",
    "k_max",
    "n_k",
    "sigma",
    "t_list",
    "t",
    "seed",
    "out_dir",
    "band_lo",
    "band_hi",
    "data_width",
    "data_k0",
    "k_lo",
    "k_hi",
    "n_scatter",
    "fit_min",
    "fit_max",
    "tol",
    "n_trials",
];

struct Defaults {
    half_width: f64,
    n_points: usize,
    k_max: f64,
    n_k: usize,
    sigma: f64,
    t_list: &'static str,
    band: (f64, f64),
    data_width: f64,
    data_k0: f64,
    tol: f64,
}

fn defaults_for(experiment: Experiment) -> Defaults {
    let base = Defaults {
        half_width: 40.0,
        n_points: 512,
        k_max: 8.0,
        n_k: 1025,
        sigma: 1.1,
        t_list: "log:10,100,7",
        band: (-7.0, 7.0),
        data_width: 2.0,
        data_k0: 0.0,
        tol: 1e-3,
    };
    match experiment {
        Experiment::FreeDecay => Defaults {
            n_points: 256,
            n_k: 257,
            // wide smooth band flat through k ~ 4, gone by k ~ 6
            band: (-37.0, 37.0),
            ..base
        },
        Experiment::Scattering => Defaults { k_max: 12.0, ..base },
        Experiment::Evolve => Defaults {
            n_points: 1024,
            k_max: 3.0,
            n_k: 2049,
            ..base
        },
        Experiment::Born => Defaults {
            half_width: 128.0,
            n_points: 1024,
            n_k: 2049,
            data_width: 2.8284271247461903, // sqrt(8)
            data_k0: 4.0,
            sigma: -1.0,
            ..base
        },
        Experiment::PerturbedDecay => Defaults {
            k_max: 3.0,
            n_k: 2049,
            sigma: 1.6,
            t_list: "log:20,200,8",
            ..base
        },
        Experiment::InterpCheck => Defaults {
            n_points: 128,
            n_k: 129,
            t_list: "10,15,20",
            ..base
        },
        Experiment::OscCheck => Defaults {
            t_list: "log:1,100,7",
            ..base
        },
        _ => base,
    }
}

/// Resolve a key-value map into a typed configuration.
pub fn resolve(map: &BTreeMap<String, String>) -> Result<RunConfig> {
    for key in map.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!("unknown key '{key}'");
        }
    }
    let get = |key: &str| map.get(key).map(String::as_str);
    let experiment = Experiment::parse(
        get("experiment").ok_or_else(|| anyhow!("missing required key 'experiment'"))?,
    )?;
    let d = defaults_for(experiment);

    let parse_f64 = |key: &str, default: f64| -> Result<f64> {
        match get(key) {
            Some(v) => v.parse::<f64>().map_err(|e| anyhow!("key '{key}' = '{v}': {e}")),
            None => Ok(default),
        }
    };
    let parse_usize = |key: &str, default: usize| -> Result<usize> {
        match get(key) {
            Some(v) => v.parse::<usize>().map_err(|e| anyhow!("key '{key}' = '{v}': {e}")),
            None => Ok(default),
        }
    };

    let mass = parse_f64("mass", 1.0)?;
    let beta_claim = match get("beta_claim") {
        Some(v) => Some(v.parse::<f64>().map_err(|e| anyhow!("key 'beta_claim': {e}"))?),
        None => None,
    };
    let potential = parse_potential(get("potential").unwrap_or("zero"), beta_claim)?;
    let half_width = parse_f64("L", d.half_width)?;
    let n_points = parse_usize("N", d.n_points)?;
    let k_max = parse_f64("k_max", d.k_max)?;
    let n_k = parse_usize("n_k", d.n_k)?;
    let sigma = parse_f64("sigma", d.sigma)?;
    let t_list = parse_t_list(get("t_list").unwrap_or(d.t_list))?;
    let t = parse_f64("t", 10.0)?;
    let seed = match get("seed") {
        Some(v) => v.parse::<u64>().map_err(|e| anyhow!("key 'seed': {e}"))?,
        None => 7,
    };
    let out_dir = get("out_dir").unwrap_or(".").to_string();
    let band_lo = parse_f64("band_lo", d.band.0)?;
    let band_hi = parse_f64("band_hi", d.band.1)?;
    let data_width = parse_f64("data_width", d.data_width)?;
    let data_k0 = parse_f64("data_k0", d.data_k0)?;
    let k_lo = parse_f64("k_lo", 0.1)?;
    let k_hi = parse_f64("k_hi", 10.0)?;
    let n_scatter = parse_usize("n_scatter", 100)?;
    let fit_min = match get("fit_min") {
        Some(v) => Some(v.parse::<f64>().map_err(|e| anyhow!("key 'fit_min': {e}"))?),
        None => None,
    };
    let fit_max = match get("fit_max") {
        Some(v) => Some(v.parse::<f64>().map_err(|e| anyhow!("key 'fit_max': {e}"))?),
        None => None,
    };
    let tol = parse_f64("tol", d.tol)?;
    let n_trials = parse_usize("n_trials", 100)?;

    let mut echo = BTreeMap::new();
    let potential_echo = get("potential").unwrap_or("zero").to_string();
    echo.insert("experiment".into(), experiment.name().into());
    echo.insert("mass".into(), format!("{mass}"));
    echo.insert("potential".into(), potential_echo);
    echo.insert("beta_claim".into(), format!("{}", potential.beta_claim));
    echo.insert("L".into(), format!("{half_width}"));
    echo.insert("N".into(), format!("{n_points}"));
    echo.insert("k_max".into(), format!("{k_max}"));
    echo.insert("n_k".into(), format!("{n_k}"));
    echo.insert("sigma".into(), format!("{sigma}"));
    echo.insert(
        "t_list".into(),
        t_list.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(","),
    );
    echo.insert("t".into(), format!("{t}"));
    echo.insert("seed".into(), format!("{seed}"));
    echo.insert("band_lo".into(), format!("{band_lo}"));
    echo.insert("band_hi".into(), format!("{band_hi}"));
    echo.insert("data_width".into(), format!("{data_width}"));
    echo.insert("data_k0".into(), format!("{data_k0}"));
    echo.insert("k_lo".into(), format!("{k_lo}"));
    echo.insert("k_hi".into(), format!("{k_hi}"));
    echo.insert("n_scatter".into(), format!("{n_scatter}"));
    echo.insert("tol".into(), format!("{tol}"));
    echo.insert("n_trials".into(), format!("{n_trials}"));
    if let Some(v) = fit_min {
        echo.insert("fit_min".into(), format!("{v}"));
    }
    if let Some(v) = fit_max {
        echo.insert("fit_max".into(), format!("{v}"));
    }

    Ok(RunConfig {
        experiment,
        mass,
        potential,
        half_width,
        n_points,
        k_max,
        n_k,
        sigma,
        t_list,
        t,
        seed,
        out_dir,
        band_lo,
        band_hi,
        data_width,
        data_k0,
        k_lo,
        k_hi,
        n_scatter,
        fit_min,
        fit_max,
        tol,
        n_trials,
        echo,
    })
}

/// Load a config file and apply `--override key=value` pairs on top.
pub fn load(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut map = parse_key_values(&text)?;
    for entry in overrides {
        let (key, value) = entry
            .split_once('=')
            .with_context(|| format!("override '{entry}' is not key=value"))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    resolve(&map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let map = parse_key_values("experiment = scattering\n").unwrap();
        let cfg = resolve(&map).unwrap();
        assert_eq!(cfg.experiment, Experiment::Scattering);
        assert_eq!(cfg.mass, 1.0);
        assert!(cfg.potential.is_zero());
        assert_eq!(cfg.n_scatter, 100);
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_key_values("experiment=evolve\nexperiment=born\n").unwrap_err();
        assert!(err.to_string().contains("duplicate key 'experiment'"));
    }

    #[test]
    fn unknown_key_rejected() {
        let map = parse_key_values("experiment=evolve\nwibble=3\n").unwrap();
        let err = resolve(&map).unwrap_err();
        assert!(err.to_string().contains("unknown key 'wibble'"));
    }

    #[test]
    fn potential_forms_parse() {
        let map = parse_key_values("experiment=resonance\npotential=sech2:2.0\n").unwrap();
        let cfg = resolve(&map).unwrap();
        assert!((cfg.potential.eval(0.0) - 2.0).abs() < 1e-15);
        let map = parse_key_values("experiment=resonance\npotential=power:1,3\n").unwrap();
        assert!(resolve(&map).is_ok());
        let map = parse_key_values("experiment=resonance\npotential=wat:1\n").unwrap();
        assert!(resolve(&map).is_err());
    }

    #[test]
    fn t_list_forms() {
        assert_eq!(parse_t_list("1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        let log = parse_t_list("log:10,100,3").unwrap();
        assert_eq!(log.len(), 3);
        assert!((log[0] - 10.0).abs() < 1e-12 && (log[2] - 100.0).abs() < 1e-12);
        assert!(parse_t_list("log:10,100").is_err());
    }
}
