//! Experiment configuration: flat `key = value` text.
//!
//! ```text
//! # FARIMA(0, 0.35, 0) read along a Pareto(2.8) walk
//! model = farima
//! d = 0.35
//! law = pareto:2.8
//! n = 5000
//! reps = 100
//! seed = 7
//! estimator = fexp
//! ```
//!
//! Keys: `model` (`farima` or `gegenbauer`), `d`, `ar`, `ma`, `noise_var`,
//! `components` (`θ:d` pairs, Gegenbauer only), `law`, `n`, `reps`, `seed`,
//! `estimator` (`gph` or `fexp`), `tuning`, `lags`, `outputs`, `ma_order`,
//! `t_max`. Everything after `#` on a line is ignored.

use std::collections::BTreeMap;
use std::path::PathBuf;

use lmsample_core::memest::{default_fexp_order, default_gph_bandwidth, Method};
use lmsample_core::procgen::{FarimaSpec, GegenbauerSpec, DEFAULT_MA_ORDER};
use lmsample_core::samplaw::SamplingLaw;

use crate::error::{CliError, Result};

/// Walks whose last time exceeds this are redrawn.
pub const DEFAULT_T_MAX: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Farima(FarimaSpec),
    Gegenbauer(GegenbauerSpec),
}

impl Model {
    /// Memory parameter at the origin, when the model has one.
    pub fn d(&self) -> Option<f64> {
        match self {
            Self::Farima(s) => Some(s.d),
            Self::Gegenbauer(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: Model,
    pub law: SamplingLaw,
    /// observations of `Y` per replication
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub estimator: Method,
    /// GPH bandwidth or FEXP order; the estimator default when `None`
    pub tuning: Option<usize>,
    /// largest lag of the per-replication ACF output, 0 for none
    pub lags: usize,
    pub outputs: Option<PathBuf>,
    /// moving-average truncation; every value also uses `ma_order`
    /// innovations before the first observation, which acts as burn-in
    pub ma_order: usize,
    pub t_max: u64,
}

impl ExperimentConfig {
    pub fn new(model: Model, law: SamplingLaw, n: usize, reps: usize, seed: u64) -> Self {
        Self {
            model,
            law,
            n,
            reps,
            seed,
            estimator: Method::Fexp,
            tuning: None,
            lags: 0,
            outputs: None,
            ma_order: DEFAULT_MA_ORDER,
            t_max: DEFAULT_T_MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 64 {
            return Err(CliError::config(format!(
                "n = {} must be at least 64",
                self.n
            )));
        }
        if self.reps == 0 {
            return Err(CliError::config("reps must be at least 1"));
        }
        if self.ma_order == 0 {
            return Err(CliError::config("ma_order must be at least 1"));
        }
        if self.lags >= self.n {
            return Err(CliError::config("lags must be below n"));
        }
        match &self.model {
            Model::Farima(s) => s.validate()?,
            Model::Gegenbauer(s) => s.validate()?,
        }
        self.law.validate()?;
        Ok(())
    }

    pub fn tuning_value(&self) -> usize {
        self.tuning.unwrap_or(match self.estimator {
            Method::Gph => default_gph_bandwidth(self.n),
            Method::Fexp => default_fexp_order(self.n),
        })
    }

    /// Canonical `key = value` pairs; [`parse_config`] reads them back.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match &self.model {
            Model::Farima(s) => {
                put("model", "farima".into());
                put("d", s.d.to_string());
                put("ar", join(&s.ar_coeffs));
                put("ma", join(&s.ma_coeffs));
                put("noise_var", s.noise_var.to_string());
            }
            Model::Gegenbauer(s) => {
                put("model", "gegenbauer".into());
                let comps: Vec<String> = s
                    .components
                    .iter()
                    .map(|(t, d)| format!("{t}:{d}"))
                    .collect();
                put("components", comps.join(","));
                let (ar, ma, var) = s.arma.as_ref().map_or((vec![], vec![], 1.0), |a| {
                    (a.ar_coeffs.clone(), a.ma_coeffs.clone(), a.noise_var)
                });
                put("ar", join(&ar));
                put("ma", join(&ma));
                put("noise_var", var.to_string());
            }
        }
        put("law", self.law.to_string());
        put("n", self.n.to_string());
        put("reps", self.reps.to_string());
        put("seed", self.seed.to_string());
        put("estimator", self.estimator.as_str().to_string());
        put("tuning", self.tuning_value().to_string());
        put("lags", self.lags.to_string());
        if let Some(p) = &self.outputs {
            put("outputs", p.display().to_string());
        }
        put("ma_order", self.ma_order.to_string());
        put("t_max", self.t_max.to_string());
        m
    }

    pub fn render(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

const KEYS: &[&str] = &[
    "model",
    "d",
    "ar",
    "ma",
    "noise_var",
    "components",
    "law",
    "n",
    "reps",
    "seed",
    "estimator",
    "tuning",
    "lags",
    "outputs",
    "ma_order",
    "t_max",
];

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("'{t}' is not a number")))
        })
        .collect()
}

/// `θ:d` pairs separated by commas.
pub fn parse_components(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once(':')
                .ok_or_else(|| CliError::config(format!("component '{t}' is not θ:d")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::config(format!("component '{t}' is not θ:d")))
            };
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

pub fn parse_method(s: &str) -> Result<Method> {
    match s.trim() {
        "gph" => Ok(Method::Gph),
        "fexp" => Ok(Method::Fexp),
        other => Err(CliError::config(format!("unknown estimator '{other}'"))),
    }
}

pub fn parse_law(s: &str) -> Result<SamplingLaw> {
    s.trim().parse().map_err(CliError::from)
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}: expected key = value", no + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::config(format!(
                "line {}: unknown key '{k}'",
                no + 1
            )));
        }
        if kv.insert(k, v.trim()).is_some() {
            return Err(CliError::config(format!(
                "line {}: duplicate key '{k}'",
                no + 1
            )));
        }
    }
    let req = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| CliError::config(format!("missing key '{k}'")))
    };
    fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
        v.parse()
            .map_err(|_| CliError::config(format!("{k} = '{v}' has the wrong type")))
    }
    let opt_num =
        |k: &str| -> Result<Option<f64>> { kv.get(k).map(|v| num::<f64>(k, v)).transpose() };
    let ar = parse_f64_list(kv.get("ar").copied().unwrap_or(""))?;
    let ma = parse_f64_list(kv.get("ma").copied().unwrap_or(""))?;
    let noise_var = opt_num("noise_var")?.unwrap_or(1.0);
    let model = match kv.get("model").copied().unwrap_or("farima") {
        "farima" => {
            if kv.contains_key("components") {
                return Err(CliError::config(
                    "components only apply to model = gegenbauer",
                ));
            }
            Model::Farima(FarimaSpec::new(ar, ma, num("d", req("d")?)?, noise_var)?)
        }
        "gegenbauer" => {
            if kv.contains_key("d") {
                return Err(CliError::config(
                    "model = gegenbauer takes its exponents from components",
                ));
            }
            let comps = parse_components(req("components")?)?;
            let arma = if ar.is_empty() && ma.is_empty() && noise_var == 1.0 {
                None
            } else {
                Some(FarimaSpec::new(ar, ma, 0.0, noise_var)?)
            };
            Model::Gegenbauer(GegenbauerSpec::new(comps, arma)?)
        }
        other => return Err(CliError::config(format!("unknown model '{other}'"))),
    };
    let mut cfg = ExperimentConfig::new(
        model,
        parse_law(req("law")?)?,
        num("n", req("n")?)?,
        num("reps", req("reps")?)?,
        kv.get("seed")
            .map(|v| num("seed", v))
            .transpose()?
            .unwrap_or(1),
    );
    if let Some(v) = kv.get("estimator") {
        cfg.estimator = parse_method(v)?;
    }
    cfg.tuning = kv.get("tuning").map(|v| num("tuning", v)).transpose()?;
    if let Some(v) = kv.get("lags") {
        cfg.lags = num("lags", v)?;
    }
    cfg.outputs = kv
        .get("outputs")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    if let Some(v) = kv.get("ma_order") {
        cfg.ma_order = num("ma_order", v)?;
    }
    if let Some(v) = kv.get("t_max") {
        cfg.t_max = num("t_max", v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "# comment\nd = 0.35   # memory\nlaw = pareto:2.8\nn = 5000\nreps = 100\n";

    #[test]
    fn defaults() {
        let c = parse_config(BASIC).unwrap();
        assert_eq!(c.seed, 1);
        assert_eq!(c.estimator, Method::Fexp);
        assert_eq!(c.tuning_value(), 8);
        assert_eq!(c.ma_order, DEFAULT_MA_ORDER);
        assert_eq!(c.model.d(), Some(0.35));
    }

    #[test]
    fn render_round_trips() {
        let c = parse_config(&format!("{BASIC}estimator = gph\nar = 0.5\nlags = 30\n")).unwrap();
        assert_eq!(parse_config(&c.render()).unwrap().to_pairs(), c.to_pairs());
        let g = parse_config(
            "model = gegenbauer\ncomponents = 0:0.2, 1.5:0.1\nlaw = dirac:1\nn = 64\nreps = 2\n",
        )
        .unwrap();
        let back = parse_config(&g.render()).unwrap();
        assert_eq!(back.model, g.model);
        // the echo records the effective tuning
        assert_eq!(back.tuning, Some(g.tuning_value()));
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "d = 0.35\nlaw = pareto:2.8\nn = 63\nreps = 1\n",
            "d = 0.35\nlaw = pareto:2.8\nn = 100\nreps = 0\n",
            "d = 0.6\nlaw = pareto:2.8\nn = 100\nreps = 1\n",
            "d = 0.3\nlaw = pareto:0.8\nn = 100\nreps = 1\n",
            "d = 0.3\nlaw = pareto:2\nn = 100\nreps = 1\ncolour = red\n",
            "d = 0.3\nd = 0.2\nlaw = pareto:2\nn = 100\nreps = 1\n",
            "d = x\nlaw = pareto:2\nn = 100\nreps = 1\n",
            "law = pareto:2\nn = 100\nreps = 1\n",
            "d = 0.3\nlaw = pareto:2\nn = 100\nreps = 1\nestimator = whittle\n",
            "just text\n",
        ] {
            let e = parse_config(bad).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}: {e}");
        }
    }
}
