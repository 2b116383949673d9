//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lmsample_core::covmap::{
    predict_memory, sampled_cov_exact_lags, sampled_cov_mc, FarimaCov, Regime,
};
use lmsample_core::math::quad::QuadConfig;
use lmsample_core::memest::{
    default_fexp_order, default_gph_bandwidth, emp_acf, fexp, gph, Method,
};
use lmsample_core::procgen::{
    farima_ma_coeffs, gegenbauer_autocov, gen_at_indices, gen_trajectory_exact, FarimaSpec,
    GegenbauerSpec, DEFAULT_MA_ORDER,
};
use lmsample_core::rng::{derive_seed, tag};
use lmsample_core::samplaw::{walk_capped, DEFAULT_TABLE_BUDGET};
use lmsample_core::specmap::{
    default_kernel_quad, relative_r_seq, sampled_sd_limit, AliasedDensity, SpectralDensity,
};

use crate::config::{parse_components, parse_config, parse_law, DEFAULT_T_MAX};
use crate::error::{CliError, Result};
use crate::figures::{
    default_gamma_grid, repro_acf_figure, repro_dest_figure, AcfFigureParams,
    EstimationFigureParams,
};
use crate::harness::{record_json, run_experiment, walk_seed, write_outputs, MAX_WALK_RETRIES};
use crate::output::{emit, fmt_f64, svg_panels, Csv, Panel, Series};

#[derive(Debug, Parser)]
#[command(
    name = "lmsample",
    version,
    about = "Long-memory processes observed at random times"
)]
pub struct Cli {
    /// Master seed [default: 1; experiment: the config's seed]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for replications
    #[arg(long, global = true, env = "LMSAMPLE_THREADS")]
    pub threads: Option<usize>,
    /// Write outputs as files in this directory instead of stdout
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gph,
    Fexp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gph => Method::Gph,
            MethodArg::Fexp => Method::Fexp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectralKind {
    Farima,
    Gegenbauer,
    Alias,
    Sampled,
}

/// FARIMA(p, d, q) parameters, or Gegenbauer components.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0.35)]
    pub d: f64,
    /// AR coefficients a_1,...,a_p of A(z) = 1 + a_1 z + ...
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub ar: String,
    /// MA coefficients b_1,...,b_q of B(z) = 1 + b_1 z + ...
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub ma: String,
    /// Innovation variance
    #[arg(long, default_value_t = 1.0)]
    pub var: f64,
    /// Gegenbauer components θ:d,... (replaces the FARIMA model)
    #[arg(long)]
    pub components: Option<String>,
}

impl ModelArgs {
    pub fn farima(&self) -> Result<FarimaSpec> {
        Ok(FarimaSpec::new(
            crate::config::parse_f64_list(&self.ar)?,
            crate::config::parse_f64_list(&self.ma)?,
            self.d,
            self.var,
        )?)
    }

    pub fn gegenbauer(&self) -> Result<Option<GegenbauerSpec>> {
        let Some(c) = &self.components else {
            return Ok(None);
        };
        let ar = crate::config::parse_f64_list(&self.ar)?;
        let ma = crate::config::parse_f64_list(&self.ma)?;
        let arma = if ar.is_empty() && ma.is_empty() && self.var == 1.0 {
            None
        } else {
            Some(FarimaSpec::new(ar, ma, 0.0, self.var)?)
        };
        Ok(Some(GegenbauerSpec::new(parse_components(c)?, arma)?))
    }

    fn density(&self) -> Result<Box<dyn SpectralDensity>> {
        Ok(match self.gegenbauer()? {
            Some(g) => Box::new(g),
            None => Box::new(self.farima()?),
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a trajectory (columns t,x)
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Moving-average truncation order
        #[arg(long, default_value_t = DEFAULT_MA_ORDER)]
        m: usize,
    },
    /// Draw a sampling walk and the sampled series (columns j,t,y)
    Sample {
        #[arg(long)]
        law: String,
        /// Number of steps; times T_0..T_n are printed
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_MA_ORDER)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: u64,
    },
    /// Autocovariance: empirical from --input, else of the sampled FARIMA model
    Acf {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Column of --input to read [default: last]
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value_t = 20)]
        maxlag: usize,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "dirac:1")]
        law: String,
        /// Absolute tolerance of the exact computation
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Monte Carlo replications instead of the exact computation
        #[arg(long)]
        mc: Option<usize>,
    },
    /// Estimate d from a series
    Estimate {
        #[arg(long, value_enum, default_value_t = MethodArg::Fexp)]
        method: MethodArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: Option<String>,
        /// GPH bandwidth or FEXP order
        #[arg(long)]
        tuning: Option<usize>,
    },
    /// Spectral density on a frequency grid (columns freq,value)
    Spectral {
        #[arg(long, value_enum)]
        kind: SpectralKind,
        #[command(flatten)]
        model: ModelArgs,
        /// Decimation factor for --kind alias
        #[arg(long, default_value_t = 2)]
        k: u64,
        /// Sampling law for --kind sampled
        #[arg(long, default_value = "pareto:2.8")]
        law: String,
        /// Grid midpoints π(j - 1/2)/points, j = 1..points
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Memory regime of the sampled process
    Predict {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        law: String,
    },
    /// Run replications from a config file
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Autocovariances of X and two sampled versions (lag,acf_x,acf_y1,acf_y2)
    ReproFig1 {
        #[arg(long, default_value_t = 0.35)]
        d: f64,
        #[arg(long, default_value_t = 2.8)]
        gamma1: f64,
        #[arg(long, default_value_t = 1.9)]
        gamma2: f64,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        maxlag: usize,
        #[arg(long, default_value_t = DEFAULT_MA_ORDER)]
        m: usize,
    },
    /// Estimates of d_Y over a grid of tail indices
    ReproFig2 {
        #[arg(long, default_value = "0.1,0.35")]
        ds: String,
        /// [default: 1.7,1.8,...,3.3]
        #[arg(long)]
        gammas: Option<String>,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Fexp)]
        method: MethodArg,
        #[arg(long)]
        tuning: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MA_ORDER)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: u64,
    },
}

/// Line chart of a table: first column against each of the others.
pub fn csv_svg(csv: &Csv, title: &str) -> String {
    let parse = |s: &String| s.parse::<f64>().unwrap_or(f64::NAN);
    let series = (1..csv.header.len())
        .map(|c| Series {
            label: csv.header[c].clone(),
            points: csv
                .rows
                .iter()
                .map(|r| (parse(&r[0]), parse(&r[c])))
                .collect(),
            markers: false,
        })
        .collect();
    svg_panels(
        &[Panel {
            title: title.into(),
            x_label: csv.header[0].clone(),
            y_label: String::new(),
            series,
        }],
        640.0,
        360.0,
    )
}

impl Cli {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    fn emit_table(&self, csv: &Csv, name: &str, out: &mut dyn Write) -> Result<()> {
        match self.format {
            Format::Csv => emit(
                self.out_dir.as_deref(),
                &format!("{name}.csv"),
                &csv.render(),
                out,
            ),
            Format::Svg => emit(
                self.out_dir.as_deref(),
                &format!("{name}.svg"),
                &csv_svg(csv, name),
                out,
            ),
        }
    }

    fn emit_text(&self, text: &str, out: &mut dyn Write) -> Result<()> {
        out.write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))
    }

    /// Runs the command, writing results to `out` (or the output directory).
    pub fn run(&self, out: &mut dyn Write) -> Result<()> {
        let seed = self.seed();
        match &self.command {
            Command::Simulate { model, n, m } => {
                if *n == 0 {
                    return Err(CliError::config("n must be positive"));
                }
                let noise = derive_seed(seed, 0, tag::NOISE);
                let x = match model.gegenbauer()? {
                    Some(g) => {
                        let cov = gegenbauer_autocov(&g, n - 1, &QuadConfig::default())?;
                        gen_trajectory_exact(&cov, *n, noise)?.values
                    }
                    None => {
                        let table = farima_ma_coeffs(&model.farima()?, *m)?;
                        gen_at_indices(&table, &(0..*n as u64).collect::<Vec<_>>(), noise)
                    }
                };
                let mut csv = Csv::new(seed, "simulate", &["t", "x"]);
                for (t, v) in x.iter().enumerate() {
                    csv.push(vec![t.to_string(), fmt_f64(*v)]);
                }
                self.emit_table(&csv, "simulate", out)
            }
            Command::Sample {
                law,
                n,
                model,
                m,
                t_max,
            } => {
                let law = parse_law(law)?;
                let path = (0..=MAX_WALK_RETRIES)
                    .find_map(|a| walk_capped(&law, *n, walk_seed(seed, 0, a), *t_max))
                    .ok_or_else(|| CliError::Failed(format!("walk exceeded T_max = {t_max}")))?;
                let table = farima_ma_coeffs(&model.farima()?, *m)?;
                let y = gen_at_indices(&table, &path.times, derive_seed(seed, 0, tag::NOISE));
                let mut csv = Csv::new(seed, "sample", &["j", "t", "y"]);
                for (j, (t, v)) in path.times.iter().zip(&y).enumerate() {
                    csv.push(vec![j.to_string(), t.to_string(), fmt_f64(*v)]);
                }
                self.emit_table(&csv, "sample", out)
            }
            Command::Acf {
                input,
                column,
                maxlag,
                model,
                law,
                tol,
                mc,
            } => {
                let csv = match input {
                    Some(p) => {
                        let x = crate::output::read_series(p, column.as_deref())?;
                        let a = emp_acf(&x, *maxlag)?;
                        let mut csv = Csv::new(seed, "acf", &["lag", "acf"]);
                        for (h, v) in a.values.iter().enumerate() {
                            csv.push_f64(&[h as f64, *v]);
                        }
                        csv
                    }
                    None => model_acf(&model.farima()?, law, *maxlag, *tol, *mc, seed)?,
                };
                self.emit_table(&csv, "acf", out)
            }
            Command::Estimate {
                method,
                input,
                column,
                tuning,
            } => {
                let x = crate::output::read_series(input, column.as_deref())?;
                let method = Method::from(*method);
                let e = match method {
                    Method::Gph => {
                        gph(&x, tuning.unwrap_or_else(|| default_gph_bandwidth(x.len())))
                    }
                    Method::Fexp => fexp(&x, tuning.unwrap_or_else(|| default_fexp_order(x.len()))),
                }?;
                let tuning_name = if method == Method::Gph { "m" } else { "p" };
                self.emit_text(
                    &format!(
                        "d_hat = {:.4}, stderr = {:.4}, ci95 = [{:.4}, {:.4}] ({}, {tuning_name} = {}, n = {})\n",
                        e.d_hat, e.stderr, e.ci95.0, e.ci95.1, method.as_str(), e.bandwidth_or_order, e.n
                    ),
                    out,
                )
            }
            Command::Spectral {
                kind,
                model,
                k,
                law,
                points,
            } => {
                let csv = spectral_grid(*kind, model, *k, law, *points, seed)?;
                self.emit_table(&csv, "spectral", out)
            }
            Command::Predict { d, law } => {
                let p = predict_memory(*d, &parse_law(law)?)?;
                let line = match p.regime {
                    Regime::Short => "short, d_Y = 0".to_string(),
                    r => format!("{}, d_Y = {:.2}", r.as_str(), p.d_value()),
                };
                let decay = p
                    .alpha_out
                    .map(|a| format!("σ_Y(h) decays like h^-{a:.4}"))
                    .unwrap_or_default();
                self.emit_text(&format!("{line}\n{decay}\n"), out)
            }
            Command::Experiment { config } => {
                let text = std::fs::read_to_string(config).map_err(|e| CliError::io(config, e))?;
                let mut cfg = parse_config(&text)?;
                if let Some(s) = self.seed {
                    cfg.seed = s;
                }
                let rec = run_experiment(&cfg, self.threads)?;
                let dir = self.out_dir.clone().or_else(|| cfg.outputs.clone());
                match dir {
                    Some(d) => {
                        write_outputs(&rec, cfg.seed, &d)?;
                        let s = &rec.summary;
                        self.emit_text(
                            &format!(
                                "mean d_hat = {:.4}, sd = {:.4}, band = [{:.4}, {:.4}], {} of {} ok; wrote {}\n",
                                s.mean,
                                s.sd,
                                s.band_lo,
                                s.band_hi,
                                s.n_ok,
                                cfg.reps,
                                d.display()
                            ),
                            out,
                        )
                    }
                    None => self.emit_text(&record_json(&rec), out),
                }
            }
            Command::ReproFig1 {
                d,
                gamma1,
                gamma2,
                n,
                maxlag,
                m,
            } => {
                let f = repro_acf_figure(&AcfFigureParams {
                    d: *d,
                    gamma1: *gamma1,
                    gamma2: *gamma2,
                    n: *n,
                    maxlag: *maxlag,
                    fit_lo: 1,
                    fit_hi: (*maxlag).min(20),
                    seed,
                    ma_order: *m,
                })?;
                self.emit_figure(&f.csv.render(), &f.svg, "fig1", out)
            }
            Command::ReproFig2 {
                ds,
                gammas,
                n,
                reps,
                method,
                tuning,
                m,
                t_max,
            } => {
                let f = repro_dest_figure(&EstimationFigureParams {
                    ds: crate::config::parse_f64_list(ds)?,
                    gammas: match gammas {
                        Some(g) => crate::config::parse_f64_list(g)?,
                        None => default_gamma_grid(),
                    },
                    n: *n,
                    reps: *reps,
                    seed,
                    estimator: (*method).into(),
                    tuning: *tuning,
                    ma_order: *m,
                    t_max: *t_max,
                    threads: self.threads,
                })?;
                self.emit_figure(&f.csv.render(), &f.svg, "fig2", out)
            }
        }
    }

    /// Both files into the output directory, else the chosen format.
    fn emit_figure(&self, csv: &str, svg: &str, name: &str, out: &mut dyn Write) -> Result<()> {
        match &self.out_dir {
            Some(d) => {
                emit(Some(d), &format!("{name}.csv"), csv, out)?;
                emit(Some(d), &format!("{name}.svg"), svg, out)
            }
            None => self.emit_text(if self.format == Format::Csv { csv } else { svg }, out),
        }
    }
}

fn model_acf(
    spec: &FarimaSpec,
    law: &str,
    maxlag: usize,
    tol: f64,
    mc: Option<usize>,
    seed: u64,
) -> Result<Csv> {
    let law = parse_law(law)?;
    let sigma = FarimaCov::new(spec)?;
    let lags: Vec<u64> = (0..=maxlag as u64).collect();
    match mc {
        Some(reps) => {
            let mut csv = Csv::new(seed, "acf", &["lag", "acf", "se"]);
            for &h in &lags {
                let (m, se) = sampled_cov_mc(&sigma, &law, h, reps, derive_seed(seed, h, tag::MC))?;
                csv.push_f64(&[h as f64, m, se]);
            }
            Ok(csv)
        }
        None => {
            let e = sampled_cov_exact_lags(&sigma, &law, &lags, tol, DEFAULT_TABLE_BUDGET)?;
            let mut csv = Csv::new(seed, "acf", &["lag", "acf", "error_bound"]);
            for ((h, v), b) in lags.iter().zip(&e.values).zip(&e.error_bounds) {
                csv.push_f64(&[*h as f64, *v, *b]);
            }
            Ok(csv)
        }
    }
}

fn spectral_grid(
    kind: SpectralKind,
    model: &ModelArgs,
    k: u64,
    law: &str,
    points: usize,
    seed: u64,
) -> Result<Csv> {
    if points == 0 {
        return Err(CliError::config("points must be positive"));
    }
    let freqs: Vec<f64> = (1..=points)
        .map(|j| std::f64::consts::PI * (j as f64 - 0.5) / points as f64)
        .collect();
    let values: Vec<f64> = match kind {
        SpectralKind::Farima => {
            let s = model.farima()?;
            freqs.iter().map(|&l| s.eval(l)).collect()
        }
        SpectralKind::Gegenbauer => {
            let g = model
                .gegenbauer()?
                .ok_or_else(|| CliError::config("--kind gegenbauer needs --components"))?;
            freqs.iter().map(|&l| g.eval(l)).collect()
        }
        SpectralKind::Alias => {
            if k == 0 {
                return Err(CliError::config("--k must be at least 1"));
            }
            let inner = model.density()?;
            let a = AliasedDensity {
                inner: inner.as_ref(),
                k,
            };
            freqs.iter().map(|&l| a.eval(l)).collect()
        }
        SpectralKind::Sampled => {
            let law = parse_law(law)?;
            let f = model.density()?;
            let quad = default_kernel_quad();
            freqs
                .iter()
                .map(|&t| {
                    sampled_sd_limit(f.as_ref(), &law, t, &relative_r_seq(t), &quad)
                        .map(|s| s.value)
                })
                .collect::<lmsample_core::Result<Vec<_>>>()?
        }
    };
    let mut csv = Csv::new(seed, "spectral", &["freq", "value"]);
    for (f, v) in freqs.iter().zip(&values) {
        csv.push_f64(&[*f, if v.is_finite() { *v } else { f64::NAN }]);
    }
    Ok(csv)
}

/// Parses arguments, runs, and maps errors to exit codes.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match cli.run(out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
