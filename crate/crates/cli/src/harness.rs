//! Parallel replications of "walk, sample, estimate".

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use lmsample_core::covmap::{predict_memory, CovSeq};
use lmsample_core::math::quad::QuadConfig;
use lmsample_core::memest::{emp_acf, fexp, gph, Method};
use lmsample_core::procgen::{
    farima_ma_coeffs, gegenbauer_autocov, gen_at_indices, gen_trajectory_exact, MacoeffTable,
    EXACT_MAX_N,
};
use lmsample_core::rng::{derive_seed, tag};
use lmsample_core::samplaw::{walk_capped, RandomWalkPath};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Model};
use crate::error::{CliError, Result};
use crate::output::{fmt_f64, write_file, Csv, VERSION};

/// Walk redraws allowed per replication before it is marked failed.
pub const MAX_WALK_RETRIES: u32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// successful replications
    pub n_ok: usize,
    pub mean: f64,
    /// sample standard deviation, 0 for a single value
    pub sd: f64,
    /// empirical 2.5% and 97.5% quantiles
    pub band_lo: f64,
    pub band_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub regime: String,
    pub d_out: Option<f64>,
    pub alpha_out: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: BTreeMap<String, String>,
    /// one entry per replication, `None` when it failed
    pub d_hats: Vec<Option<f64>>,
    pub retries: Vec<u32>,
    pub failures: Vec<Failure>,
    pub summary: Summary,
    pub prediction: Option<PredictionRecord>,
    /// mean empirical autocovariance of `Y` over successful replications
    pub mean_acf: Vec<f64>,
    pub wall_time_s: f64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub reason: String,
}

/// Mean, standard deviation and empirical 95% band of the successful values.
pub fn summarize(d_hats: &[Option<f64>]) -> Summary {
    let mut ok: Vec<f64> = d_hats.iter().flatten().copied().collect();
    let n = ok.len();
    if n == 0 {
        return Summary {
            n_ok: 0,
            mean: f64::NAN,
            sd: f64::NAN,
            band_lo: f64::NAN,
            band_hi: f64::NAN,
        };
    }
    let mean = ok.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (ok.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    ok.sort_by(f64::total_cmp);
    Summary {
        n_ok: n,
        mean,
        sd,
        band_lo: quantile(&ok, 0.025),
        band_hi: quantile(&ok, 0.975),
    }
}

/// Linear interpolation between order statistics of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// The model-specific part of one replication.
enum Sampler {
    Ma(MacoeffTable),
    /// Gaussian path over `0..=span` from exact covariances.
    Exact(CovSeq),
}

impl Sampler {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        match &cfg.model {
            Model::Farima(spec) => Ok(Self::Ma(farima_ma_coeffs(spec, cfg.ma_order)?)),
            Model::Gegenbauer(spec) => {
                let span = cfg
                    .law
                    .max_support()
                    .and_then(|k| k.checked_mul(cfg.n as u64 - 1))
                    .filter(|&s| s < EXACT_MAX_N as u64)
                    .ok_or_else(|| {
                        CliError::config(format!(
                            "Gegenbauer experiments need a bounded law with (n - 1)·max Δ < {EXACT_MAX_N}"
                        ))
                    })?;
                Ok(Self::Exact(gegenbauer_autocov(
                    spec,
                    span as usize,
                    &QuadConfig::default(),
                )?))
            }
        }
    }

    fn sample(&self, times: &[u64], seed: u64) -> Result<Vec<f64>> {
        match self {
            Self::Ma(t) => Ok(gen_at_indices(t, times, seed)),
            Self::Exact(cov) => {
                let last = *times.last().unwrap_or(&0) as usize;
                let path = gen_trajectory_exact(cov, last + 1, seed)?;
                Ok(times.iter().map(|&t| path.values[t as usize]).collect())
            }
        }
    }
}

/// Seed of walk attempt `attempt` for replication `index`.
pub fn walk_seed(master: u64, index: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        derive_seed(master, index, tag::WALK)
    } else {
        derive_seed(
            derive_seed(master, index, tag::RETRY),
            attempt as u64,
            tag::WALK,
        )
    }
}

/// Sampling times `T_0..T_{n-1}`, redrawn while `T_{n-1} > t_max`.
pub fn capped_walk(
    cfg: &ExperimentConfig,
    index: u64,
) -> std::result::Result<(RandomWalkPath, u32), String> {
    for attempt in 0..=MAX_WALK_RETRIES {
        let seed = walk_seed(cfg.seed, index, attempt);
        if let Some(w) = walk_capped(&cfg.law, cfg.n - 1, seed, cfg.t_max) {
            return Ok((w, attempt));
        }
    }
    Err(format!(
        "walk exceeded T_max = {} in {} attempts",
        cfg.t_max,
        MAX_WALK_RETRIES + 1
    ))
}

struct RepOutcome {
    d_hat: std::result::Result<f64, String>,
    retries: u32,
    acf: Option<Vec<f64>>,
}

fn replicate(cfg: &ExperimentConfig, sampler: &Sampler, index: usize) -> RepOutcome {
    let (path, retries) = match capped_walk(cfg, index as u64) {
        Ok(v) => v,
        Err(e) => {
            return RepOutcome {
                d_hat: Err(e),
                retries: MAX_WALK_RETRIES,
                acf: None,
            }
        }
    };
    let noise = derive_seed(cfg.seed, index as u64, tag::NOISE);
    let y = match sampler.sample(&path.times, noise) {
        Ok(y) => y,
        Err(e) => {
            return RepOutcome {
                d_hat: Err(e.to_string()),
                retries,
                acf: None,
            }
        }
    };
    let est = match cfg.estimator {
        Method::Gph => gph(&y, cfg.tuning_value()),
        Method::Fexp => fexp(&y, cfg.tuning_value()),
    };
    let acf = (cfg.lags > 0)
        .then(|| emp_acf(&y, cfg.lags).ok().map(|c| c.values))
        .flatten();
    RepOutcome {
        d_hat: est.map(|e| e.d_hat).map_err(|e| e.to_string()),
        retries,
        acf,
    }
}

/// Runs `cfg.reps` replications on `threads` workers (the global pool when
/// `None`). Results do not depend on the number of threads.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RunRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let sampler = Sampler::new(cfg)?;
    let work = || -> Vec<RepOutcome> {
        (0..cfg.reps)
            .into_par_iter()
            .map(|i| replicate(cfg, &sampler, i))
            .collect()
    };
    let outcomes = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let d_hats: Vec<Option<f64>> = outcomes.iter().map(|o| o.d_hat.clone().ok()).collect();
    let failures: Vec<Failure> = outcomes
        .iter()
        .enumerate()
        .filter_map(|(index, o)| {
            o.d_hat.as_ref().err().map(|reason| Failure {
                index,
                reason: reason.clone(),
            })
        })
        .collect();
    if failures.len() * 100 > cfg.reps {
        return Err(CliError::Failed(format!(
            "{} of {} replications failed; first: replication {}: {}",
            failures.len(),
            cfg.reps,
            failures[0].index,
            failures[0].reason
        )));
    }
    let mut mean_acf = vec![0.0; if cfg.lags > 0 { cfg.lags + 1 } else { 0 }];
    let acfs: Vec<&Vec<f64>> = outcomes.iter().filter_map(|o| o.acf.as_ref()).collect();
    for a in &acfs {
        for (m, v) in mean_acf.iter_mut().zip(a.iter()) {
            *m += v;
        }
    }
    for m in &mut mean_acf {
        *m /= acfs.len().max(1) as f64;
    }
    let prediction = match cfg.model.d() {
        Some(d) if d > 0.0 => {
            let p = predict_memory(d, &cfg.law)?;
            Some(PredictionRecord {
                regime: p.regime.as_str().to_string(),
                d_out: p.d_out,
                alpha_out: p.alpha_out,
            })
        }
        _ => None,
    };
    Ok(RunRecord {
        config: cfg.to_pairs(),
        summary: summarize(&d_hats),
        d_hats,
        retries: outcomes.iter().map(|o| o.retries).collect(),
        failures,
        prediction,
        mean_acf,
        wall_time_s: start.elapsed().as_secs_f64(),
        version: VERSION.to_string(),
    })
}

/// Per-replication table: `rep,d_hat,retries,status`.
pub fn replicates_csv(rec: &RunRecord, seed: u64) -> Csv {
    let mut c = Csv::new(seed, "experiment", &["rep", "d_hat", "retries", "status"]);
    for (i, (d, r)) in rec.d_hats.iter().zip(&rec.retries).enumerate() {
        c.push(vec![
            i.to_string(),
            d.map_or("nan".into(), fmt_f64),
            r.to_string(),
            if d.is_some() { "ok" } else { "failed" }.into(),
        ]);
    }
    c
}

pub fn acf_csv(rec: &RunRecord, seed: u64) -> Csv {
    let mut c = Csv::new(seed, "experiment", &["lag", "mean_acf"]);
    for (h, v) in rec.mean_acf.iter().enumerate() {
        c.push_f64(&[h as f64, *v]);
    }
    c
}

pub fn record_json(rec: &RunRecord) -> String {
    serde_json::to_string_pretty(rec).expect("run records serialize") + "\n"
}

/// `run_record.json`, `replicates.csv` and, with lags, `acf.csv` in `dir`.
pub fn write_outputs(rec: &RunRecord, seed: u64, dir: &Path) -> Result<()> {
    write_file(&dir.join("run_record.json"), &record_json(rec))?;
    write_file(
        &dir.join("replicates.csv"),
        &replicates_csv(rec, seed).render(),
    )?;
    if !rec.mean_acf.is_empty() {
        write_file(&dir.join("acf.csv"), &acf_csv(rec, seed).render())?;
    }
    Ok(())
}
