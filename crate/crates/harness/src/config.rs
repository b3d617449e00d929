//! Flat `key = value` experiment configuration.
//!
//! Every knob has a default that depends only on the experiment, so a
//! config file names the experiment and overrides what it needs. `#` starts
//! a comment anywhere on a line; values can therefore never contain `#`.

use std::fmt::Write as _;

use rmtlab_core::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use rmtlab_core::ensembles::AtomDistribution;
use rmtlab_core::linearize::{LinearizationScale, RootRoute};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CircularLaw,
    Clt,
    LeastSv,
    Cumulants,
    Universality,
    SvProfile,
    GirkoSwap,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::CircularLaw,
        Self::Clt,
        Self::LeastSv,
        Self::Cumulants,
        Self::Universality,
        Self::SvProfile,
        Self::GirkoSwap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::CircularLaw => "circular-law",
            Self::Clt => "clt",
            Self::LeastSv => "least-sv",
            Self::Cumulants => "cumulants",
            Self::Universality => "universality",
            Self::SvProfile => "sv-profile",
            Self::GirkoSwap => "girko-swap",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment '{name}'")))
    }

    /// The matrix scale the experiment is defined on. Configs naming any
    /// other scale are rejected.
    pub fn regime(self) -> LinearizationScale {
        match self {
            Self::LeastSv | Self::Universality | Self::SvProfile => LinearizationScale::Raw,
            Self::CircularLaw | Self::Clt | Self::Cumulants | Self::GirkoSwap => LinearizationScale::Normalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub m: usize,
    /// `ginibre` (iid factors with `atoms`) or `truncated` (truncated Haar
    /// unitaries with `tau`).
    pub ensemble: String,
    pub atoms: String,
    /// Second atom law for the paired experiments.
    pub atoms_alt: String,
    pub tau: f64,
    /// `raw` or `normalized`; must equal the experiment's regime.
    pub scale: String,
    pub replicas: usize,
    pub master_seed: u64,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    pub out_dir: String,
    /// Largest tolerated fraction of failed replicas.
    pub failure_budget: f64,

    pub ks_threshold: f64,
    pub ks_threshold_trunc: f64,
    pub histogram_bins: usize,
    /// `L` values for the `(1/n) sum |lambda|^{2L}` means.
    pub monomial_orders: String,
    pub monomial_se_factor: f64,

    /// `+`-separated terms: `re:p`, `im:p`, `abs2:l`, `sym:a:b`, `const:c`,
    /// each optionally prefixed by `coef*`.
    pub test_function: String,
    pub variance_tol: f64,
    pub variance_tol_trunc: f64,

    pub n_grid: String,
    pub rho: f64,
    pub z_angle: f64,
    pub a_exponent: f64,
    pub median_band_lo: f64,
    pub median_band_hi: f64,
    pub corollary_exponent: f64,
    /// Allowed increase of the tail fraction between grid points, in
    /// binomial standard errors.
    pub tail_noise_se: f64,

    pub decay_factor: f64,
    /// Cumulants at or below this magnitude count as exact zeros.
    pub zero_floor: f64,
    pub c2_n: usize,
    /// `C_2(c2_n)` must be within `c2_tol_numerator / c2_n` of its limit.
    pub c2_tol_numerator: f64,
    pub comblemma_n_grid: String,
    pub comblemma_c_max: f64,
    pub comblemma_max_len: usize,
    pub comblemma_max_entry: u32,

    /// `re:im` pairs separated by `;`, as fractions of the spectral radius.
    pub centers: String,
    pub window_radius: f64,
    pub tau0: f64,
    pub correlation_order: usize,
    pub agreement_sigmas: f64,
    pub moment_tol: f64,
    pub root_route: String,
    pub local_law_d: f64,
    pub local_law_center: String,
    /// `r1:r2` support of the radial bump that is rescaled around the
    /// center.
    pub local_law_bump: String,
    pub local_law_factor: f64,

    pub sv_tau: f64,
    pub sv_c0: f64,
    pub sv_pass_fraction: f64,

    pub girko_n: usize,
    pub girko_grid: usize,
    pub girko_bump: String,
    pub girko_tol: f64,
    pub swap_n: usize,
    pub swap_z: String,
    pub swap_etas: String,
    /// Larger `t` is chosen so that `t ||R|| / sqrt(n)` equals this.
    pub swap_t_ratio: f64,
    /// Independent instances per `eta`.
    pub swap_replicas: usize,
    pub swap_ratio_lo: f64,
    pub swap_ratio_hi: f64,
    /// `factor:row:col`.
    pub swap_entry: String,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            n: 256,
            m: 2,
            ensemble: "ginibre".into(),
            atoms: "complex-gaussian".into(),
            atoms_alt: "four-moment-complex".into(),
            tau: 0.6,
            scale: experiment.regime().name().into(),
            replicas: 40,
            master_seed: 20_240_917,
            workers: 1,
            out_dir: "out".into(),
            failure_budget: 0.01,
            ks_threshold: 0.02,
            ks_threshold_trunc: 0.03,
            histogram_bins: 20,
            monomial_orders: "1,2".into(),
            monomial_se_factor: 3.0,
            test_function: "re:2".into(),
            variance_tol: 0.15,
            variance_tol_trunc: 0.2,
            n_grid: "64,128,256".into(),
            rho: 0.5,
            z_angle: 0.3,
            a_exponent: 0.5,
            median_band_lo: 0.05,
            median_band_hi: 50.0,
            corollary_exponent: 0.1,
            tail_noise_se: 2.0,
            decay_factor: 1.7,
            zero_floor: 1e-13,
            c2_n: 1024,
            c2_tol_numerator: 10.0,
            comblemma_n_grid: "64,256,1024".into(),
            comblemma_c_max: 10.0,
            comblemma_max_len: 3,
            comblemma_max_entry: 2,
            centers: "0.5:0.3;-0.2:-0.6".into(),
            window_radius: 1.0,
            tau0: 0.1,
            correlation_order: 1,
            agreement_sigmas: 2.0,
            moment_tol: 1e-12,
            root_route: "product-roots".into(),
            local_law_d: 0.25,
            local_law_center: "0.5:0.2".into(),
            local_law_bump: "0.2:0.8".into(),
            local_law_factor: 5.0,
            sv_tau: 0.25,
            sv_c0: 0.1,
            sv_pass_fraction: 1.0,
            girko_n: 8,
            girko_grid: 256,
            girko_bump: "0.25:0.85".into(),
            girko_tol: 0.02,
            swap_n: 64,
            swap_z: "0.4:-0.1".into(),
            swap_etas: "0.1,1".into(),
            swap_t_ratio: 0.25,
            swap_replicas: 16,
            swap_ratio_lo: 16.0,
            swap_ratio_hi: 64.0,
            swap_entry: "1:3:5".into(),
        };
        match experiment {
            Experiment::CircularLaw => {}
            Experiment::Clt => cfg.replicas = 400,
            Experiment::LeastSv | Experiment::Universality => cfg.replicas = 200,
            Experiment::Cumulants => {
                cfg.replicas = 1;
                cfg.n_grid = "16,32,64,128,256".into();
            }
            Experiment::SvProfile => {
                cfg.replicas = 20;
                cfg.atoms_alt = "rademacher".into();
            }
            Experiment::GirkoSwap => cfg.replicas = 1,
        }
        cfg
    }

    /// Parses a config file. The experiment comes from the `experiment` key
    /// or, failing that, from `fallback`; if both are present they must
    /// agree.
    pub fn parse(text: &str, fallback: Option<Experiment>) -> Result<Self> {
        let mut pairs: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(HarnessError::Config(format!("line {}: empty key", i + 1)));
            }
            if pairs.iter().any(|(_, seen, _)| *seen == k) {
                return Err(HarnessError::Config(format!("line {}: duplicate key '{k}'", i + 1)));
            }
            pairs.push((i + 1, k, v));
        }
        let named = pairs
            .iter()
            .find(|(_, k, _)| k == "experiment")
            .map(|(_, _, v)| Experiment::from_name(v))
            .transpose()?;
        let experiment = match (named, fallback) {
            (Some(a), Some(b)) if a != b => {
                return Err(HarnessError::Config(format!(
                    "config is for '{}' but '{}' was requested",
                    a.name(),
                    b.name()
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(HarnessError::Config("no experiment named".into())),
        };
        let mut cfg = Self::defaults(experiment);
        for (line, k, v) in pairs.iter().filter(|(_, k, _)| k != "experiment") {
            cfg.set(k, v).map_err(|e| match e {
                HarnessError::Config(msg) => HarnessError::Config(format!("line {line}: {msg}")),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides one key, parsing `value` like the key's current type.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "experiment" {
            return Err(HarnessError::Config("the experiment cannot be overridden".into()));
        }
        let mut map = self.to_map();
        let slot = map
            .get_mut(key)
            .ok_or_else(|| HarnessError::Config(format!("unknown key '{key}'")))?;
        *slot = parse_like(slot, key, value)?;
        *self = serde_json::from_value(Value::Object(map))
            .map_err(|e| HarnessError::Config(format!("key '{key}': {e}")))?;
        Ok(())
    }

    fn to_map(&self) -> Map<String, Value> {
        match serde_json::to_value(self).expect("config serializes") {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        }
    }

    /// JSON echo with keys in sorted order.
    pub fn to_json(&self) -> Value {
        Value::Object(self.to_map())
    }

    /// Every key, `experiment` first and the rest sorted; `parse` of the
    /// result gives back `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# rmtlab experiment configuration\n");
        let map = self.to_map();
        writeln!(out, "experiment = {}", self.experiment.name()).unwrap();
        for (k, v) in &map {
            if k == "experiment" {
                continue;
            }
            match v {
                Value::String(s) => writeln!(out, "{k} = {s}").unwrap(),
                other => writeln!(out, "{k} = {other}").unwrap(),
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        for (k, v) in self.to_map() {
            if let Value::String(s) = v {
                if s.contains('#') || s.contains('\n') || s.trim() != s || s.is_empty() {
                    return bad(format!("key '{k}': value '{s}' cannot be written as a config line"));
                }
            }
        }
        if self.n == 0 || self.m == 0 {
            return bad(format!("n and m must be positive, got n={}, m={}", self.n, self.m));
        }
        if self.replicas == 0 {
            return bad("replicas must be positive".into());
        }
        if self.scale != self.experiment.regime().name() {
            return bad(format!(
                "experiment '{}' runs on the {} scale, config says '{}'",
                self.experiment.name(),
                self.experiment.regime().name(),
                self.scale
            ));
        }
        if !matches!(self.ensemble.as_str(), "ginibre" | "truncated") {
            return bad(format!("ensemble must be 'ginibre' or 'truncated', got '{}'", self.ensemble));
        }
        if !(self.tau > 0.0) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(0.0..=1.0).contains(&self.failure_budget) {
            return bad(format!("failure_budget must lie in [0, 1], got {}", self.failure_budget));
        }
        self.atom()?;
        self.atom_alt()?;
        self.route()?;
        Ok(())
    }

    pub fn is_truncated(&self) -> bool {
        self.ensemble == "truncated"
    }

    pub fn atom(&self) -> Result<AtomDistribution> {
        AtomDistribution::from_name(&self.atoms).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn atom_alt(&self) -> Result<AtomDistribution> {
        AtomDistribution::from_name(&self.atoms_alt).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn route(&self) -> Result<RootRoute> {
        RootRoute::from_name(&self.root_route).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

fn parse_like(current: &Value, key: &str, text: &str) -> Result<Value> {
    let err = |what: &str| HarnessError::Config(format!("key '{key}': cannot parse '{text}' as {what}"));
    match current {
        Value::String(_) => Ok(Value::String(text.to_string())),
        Value::Number(n) if n.is_u64() => text.parse::<u64>().map(Value::from).map_err(|_| err("an integer")),
        Value::Number(_) => {
            let x: f64 = text.parse().map_err(|_| err("a number"))?;
            Number::from_f64(x).map(Value::Number).ok_or_else(|| err("a finite number"))
        }
        _ => Err(err("this key's type")),
    }
}

fn list_err(key: &str, text: &str) -> HarnessError {
    HarnessError::Config(format!("key '{key}': malformed list '{text}'"))
}

pub fn parse_usize_list(key: &str, text: &str) -> Result<Vec<usize>> {
    let v: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| list_err(key, text))?;
    if v.is_empty() {
        return Err(list_err(key, text));
    }
    Ok(v)
}

pub fn parse_f64_list(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<Vec<f64>>>()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| list_err(key, text))
}

/// `a:b` as a pair of numbers.
pub fn parse_pair(key: &str, text: &str) -> Result<(f64, f64)> {
    let (a, b) = text.split_once(':').ok_or_else(|| list_err(key, text))?;
    match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
        (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => Ok((a, b)),
        _ => Err(list_err(key, text)),
    }
}

pub fn parse_complex(key: &str, text: &str) -> Result<Complex64> {
    parse_pair(key, text).map(|(a, b)| Complex64::new(a, b))
}

pub fn parse_complex_list(key: &str, text: &str) -> Result<Vec<Complex64>> {
    text.split(';').map(|s| parse_complex(key, s.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_roundtrip() {
        for e in Experiment::ALL {
            let cfg = ExperimentConfig::defaults(e);
            cfg.validate().unwrap();
            assert_eq!(ExperimentConfig::parse(&cfg.to_text(), None).unwrap(), cfg);
            assert_eq!(Experiment::from_name(e.name()).unwrap(), e);
        }
    }

    #[test]
    fn overrides_and_comments() {
        let text = "# comment\nexperiment = clt\nn = 64 # trailing\n\ntau = 0.75\nensemble = truncated\n";
        let cfg = ExperimentConfig::parse(text, Some(Experiment::Clt)).unwrap();
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.tau, 0.75);
        assert!(cfg.is_truncated());
        assert_eq!(cfg.replicas, 400);
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            "experiment = clt\nbogus = 1",
            "experiment = clt\nn = -3",
            "experiment = clt\nn = 1\nn = 2",
            "experiment = clt\ntau = inf",
            "experiment = clt\nno equals sign",
            "experiment = least-sv\nscale = normalized",
            "experiment = clt\natoms = cauchy",
            "experiment = nope",
            "n = 4",
        ];
        for text in cases {
            assert!(
                matches!(ExperimentConfig::parse(text, None), Err(HarnessError::Config(_))),
                "{text}"
            );
        }
        assert!(ExperimentConfig::parse("experiment = clt", Some(Experiment::LeastSv)).is_err());
        assert!(ExperimentConfig::defaults(Experiment::Clt).set("experiment", "cumulants").is_err());
    }

    #[test]
    fn list_parsers() {
        assert_eq!(parse_usize_list("k", "64, 128,256").unwrap(), vec![64, 128, 256]);
        assert!(parse_usize_list("k", "64,,2").is_err());
        assert_eq!(parse_f64_list("k", "0.1,1").unwrap(), vec![0.1, 1.0]);
        assert_eq!(parse_pair("k", "0.2:0.8").unwrap(), (0.2, 0.8));
        let c = parse_complex_list("k", "0.5:0.3; -0.2:-0.6").unwrap();
        assert_eq!(c, vec![Complex64::new(0.5, 0.3), Complex64::new(-0.2, -0.6)]);
        assert!(parse_complex("k", "1").is_err());
    }
}
