//! The two simulation figures: empirical autocovariances of `X` and of two
//! sampled versions, and FEXP estimates of `d_Y` over a grid of tail indices.

use lmsample_core::covmap::{fit_decay, predict_memory};
use lmsample_core::memest::{emp_acf, Method};
use lmsample_core::procgen::{frac_ma_coeffs, gen_at_indices, FarimaSpec, DEFAULT_MA_ORDER};
use lmsample_core::rng::{derive_seed, tag};
use lmsample_core::samplaw::{walk_capped, SamplingLaw};

use crate::config::{ExperimentConfig, Model, DEFAULT_T_MAX};
use crate::error::{CliError, Result};
use crate::harness::{run_experiment, walk_seed, RunRecord, MAX_WALK_RETRIES};
use crate::output::{fmt_f64, svg_panels, Csv, Panel, Series};

/// Stream tag for per-cell master seeds of the estimation grid.
const CELL: u64 = 0x6365_6c6c;

#[derive(Debug, Clone, PartialEq)]
pub struct AcfFigureParams {
    pub d: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub n: usize,
    pub maxlag: usize,
    /// lag range of the decay fits; short lags separate the two sampled
    /// series best on single trajectories
    pub fit_lo: usize,
    pub fit_hi: usize,
    pub seed: u64,
    pub ma_order: usize,
}

impl Default for AcfFigureParams {
    fn default() -> Self {
        Self {
            d: 0.35,
            gamma1: 2.8,
            gamma2: 1.9,
            n: 5000,
            maxlag: 100,
            fit_lo: 1,
            fit_hi: 20,
            seed: 1,
            ma_order: DEFAULT_MA_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcfFigure {
    /// `lag, acf_x, acf_y1, acf_y2`
    pub csv: Csv,
    pub svg: String,
    /// fitted decay exponents of `acf_x`, `acf_y1`, `acf_y2`; `None` when a
    /// fit has too few positive lags
    pub alpha: [Option<f64>; 3],
}

/// One trajectory of FARIMA(0, d, 0) and the same trajectory read along two
/// Pareto-tail walks, each with `n` observations.
pub fn repro_acf_figure(p: &AcfFigureParams) -> Result<AcfFigure> {
    if p.n < 64 || p.maxlag == 0 || p.maxlag >= p.n {
        return Err(CliError::config("need n ≥ 64 and 0 < maxlag < n"));
    }
    if p.fit_lo == 0 || p.fit_lo >= p.fit_hi || p.fit_hi > p.maxlag {
        return Err(CliError::config("need 0 < fit_lo < fit_hi ≤ maxlag"));
    }
    let table = frac_ma_coeffs(p.d, p.ma_order)?;
    let noise = derive_seed(p.seed, 0, tag::NOISE);
    let mut series = Vec::with_capacity(3);
    series.push(gen_at_indices(
        &table,
        &(0..p.n as u64).collect::<Vec<_>>(),
        noise,
    ));
    for (i, g) in [p.gamma1, p.gamma2].into_iter().enumerate() {
        let law = SamplingLaw::pareto(g)?;
        let times = (0..=MAX_WALK_RETRIES)
            .find_map(|a| {
                walk_capped(
                    &law,
                    p.n - 1,
                    walk_seed(p.seed, 1 + i as u64, a),
                    DEFAULT_T_MAX,
                )
            })
            .ok_or_else(|| CliError::Failed(format!("walk for γ = {g} exceeded T_max")))?
            .times;
        series.push(gen_at_indices(&table, &times, noise));
    }
    let acfs = series
        .iter()
        .map(|s| emp_acf(s, p.maxlag))
        .collect::<lmsample_core::Result<Vec<_>>>()?;
    let mut csv = Csv::new(p.seed, "repro-fig1", &["lag", "acf_x", "acf_y1", "acf_y2"]);
    for h in 0..=p.maxlag {
        csv.push_f64(&[
            h as f64,
            acfs[0].values[h],
            acfs[1].values[h],
            acfs[2].values[h],
        ]);
    }
    let alpha = [0, 1, 2].map(|i| {
        fit_decay(&acfs[i], p.fit_lo, p.fit_hi)
            .ok()
            .map(|f| f.alpha_hat)
    });
    let titles = [
        "X".to_string(),
        format!("Y, γ = {}", p.gamma1),
        format!("Y, γ = {}", p.gamma2),
    ];
    let panels: Vec<Panel> = acfs
        .iter()
        .zip(titles)
        .map(|(a, t)| Panel {
            title: t,
            x_label: "lag".into(),
            y_label: "autocovariance".into(),
            series: vec![Series {
                label: format!("d = {}", p.d),
                points: a
                    .values
                    .iter()
                    .enumerate()
                    .map(|(h, v)| (h as f64, *v))
                    .collect(),
                markers: false,
            }],
        })
        .collect();
    Ok(AcfFigure {
        csv,
        svg: svg_panels(&panels, 320.0, 260.0),
        alpha,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationFigureParams {
    pub ds: Vec<f64>,
    pub gammas: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub estimator: Method,
    pub tuning: Option<usize>,
    pub ma_order: usize,
    pub t_max: u64,
    pub threads: Option<usize>,
}

impl Default for EstimationFigureParams {
    fn default() -> Self {
        Self {
            ds: vec![0.1, 0.35],
            gammas: default_gamma_grid(),
            n: 5000,
            reps: 100,
            seed: 1,
            estimator: Method::Fexp,
            tuning: None,
            ma_order: DEFAULT_MA_ORDER,
            t_max: DEFAULT_T_MAX,
            threads: None,
        }
    }
}

/// `1.7, 1.8, ..., 3.3`.
pub fn default_gamma_grid() -> Vec<f64> {
    (17..=33).map(|k| k as f64 / 10.0).collect()
}

/// Whether a typical `T_n ≈ n^{1/(γ-1)}` stays below `t_max`. This drops
/// the heavy-tailed short-memory laws for large `d`.
pub fn walk_feasible(gamma: f64, n: usize, t_max: u64) -> bool {
    gamma >= 2.0 || (n as f64).powf(1.0 / (gamma - 1.0)) <= t_max as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationCell {
    pub gamma: f64,
    pub d_in: f64,
    pub d_pred: f64,
    pub record: RunRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationFigure {
    /// `gamma, d_in, d_pred, d_hat_mean, band_lo, band_hi`
    pub csv: Csv,
    pub svg: String,
    pub cells: Vec<EstimationCell>,
}

/// Master seed of the `(d, γ)` cell; independent of the rest of the grid.
pub fn cell_seed(master: u64, d: f64, gamma: f64) -> u64 {
    derive_seed(
        derive_seed(master, d.to_bits(), CELL),
        gamma.to_bits(),
        CELL,
    )
}

pub fn repro_dest_figure(p: &EstimationFigureParams) -> Result<EstimationFigure> {
    let mut cells = Vec::new();
    for &d in &p.ds {
        for &gamma in &p.gammas {
            if !walk_feasible(gamma, p.n, p.t_max) {
                continue;
            }
            let law = SamplingLaw::pareto(gamma)?;
            let d_pred = predict_memory(d, &law)?.d_value();
            let mut cfg = ExperimentConfig::new(
                Model::Farima(FarimaSpec::fractional(d)?),
                law,
                p.n,
                p.reps,
                cell_seed(p.seed, d, gamma),
            );
            cfg.estimator = p.estimator;
            cfg.tuning = p.tuning;
            cfg.ma_order = p.ma_order;
            cfg.t_max = p.t_max;
            let record = run_experiment(&cfg, p.threads)?;
            cells.push(EstimationCell {
                gamma,
                d_in: d,
                d_pred,
                record,
            });
        }
    }
    let mut csv = Csv::new(
        p.seed,
        "repro-fig2",
        &[
            "gamma",
            "d_in",
            "d_pred",
            "d_hat_mean",
            "band_lo",
            "band_hi",
        ],
    );
    for c in &cells {
        let s = &c.record.summary;
        csv.push(
            [c.gamma, c.d_in, c.d_pred, s.mean, s.band_lo, s.band_hi]
                .iter()
                .map(|&v| fmt_f64(v))
                .collect(),
        );
    }
    let mut series = Vec::new();
    for &d in &p.ds {
        let mine: Vec<&EstimationCell> = cells.iter().filter(|c| c.d_in == d).collect();
        let line = |label: String, f: &dyn Fn(&EstimationCell) -> f64, markers| Series {
            label,
            points: mine.iter().map(|c| (c.gamma, f(c))).collect(),
            markers,
        };
        series.push(line(
            format!("mean, d = {d}"),
            &|c| c.record.summary.mean,
            false,
        ));
        series.push(line(
            format!("2.5%, d = {d}"),
            &|c| c.record.summary.band_lo,
            false,
        ));
        series.push(line(
            format!("97.5%, d = {d}"),
            &|c| c.record.summary.band_hi,
            false,
        ));
        series.push(line(format!("predicted, d = {d}"), &|c| c.d_pred, true));
    }
    let panel = Panel {
        title: format!(
            "{} estimates, n = {}, {} replications",
            p.estimator.as_str(),
            p.n,
            p.reps
        ),
        x_label: "γ".into(),
        y_label: "d".into(),
        series,
    };
    Ok(EstimationFigure {
        csv,
        svg: svg_panels(&[panel], 640.0, 360.0),
        cells,
    })
}
