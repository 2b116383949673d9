//! Empirical autocovariances, the periodogram, and log-periodogram
//! estimators of the memory parameter.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use libm::{cos, fabs, log, sin, sqrt};

use crate::covmap::{CovSeq, Provenance};
use crate::error::{domain, Result};
use crate::math::fft::{dft, fft_pow2};
use crate::math::linalg::least_squares;
use crate::math::{pairwise_sum, Complex64};
use crate::specmap::SpectralGrid;

/// Which log-periodogram estimator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gph,
    Fexp,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Gph => "gph",
            Method::Fexp => "fexp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub d_hat: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub method: Method,
    /// GPH bandwidth `m` or FEXP order `p`.
    pub bandwidth_or_order: usize,
    pub n: usize,
}

const Z975: f64 = 1.959_963_984_540_054;

impl EstimateResult {
    fn new(d_hat: f64, stderr: f64, method: Method, tuning: usize, n: usize) -> Self {
        Self {
            d_hat,
            stderr,
            ci95: (d_hat - Z975 * stderr, d_hat + Z975 * stderr),
            method,
            bandwidth_or_order: tuning,
            n,
        }
    }
}

/// Log-periodogram error variance.
pub const LOG_PERIODOGRAM_VAR: f64 = PI * PI / 6.0;

/// `⌊√n⌋`.
pub fn default_gph_bandwidth(n: usize) -> usize {
    libm::floor(sqrt(n as f64)) as usize
}

/// `⌊ln n⌋`, capped at 20.
pub fn default_fexp_order(n: usize) -> usize {
    (libm::floor(log(n as f64)) as usize).min(20)
}

fn centered(series: &[f64]) -> Vec<f64> {
    let mean = pairwise_sum(series) / series.len() as f64;
    series.iter().map(|x| x - mean).collect()
}

/// Biased sample autocovariance `(1/n) Σ (x_t - x̄)(x_{t+h} - x̄)`.
pub fn emp_acf(series: &[f64], maxlag: usize) -> Result<CovSeq> {
    let n = series.len();
    if maxlag >= n {
        return Err(domain(format!(
            "maxlag {maxlag} must be below the length {n}"
        )));
    }
    let x = centered(series);
    let values = if maxlag <= 64 {
        (0..=maxlag)
            .map(|h| {
                let prods: Vec<f64> = x[..n - h].iter().zip(&x[h..]).map(|(a, b)| a * b).collect();
                pairwise_sum(&prods) / n as f64
            })
            .collect::<Vec<_>>()
    } else {
        let m = (2 * n).next_power_of_two();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (b, &v) in buf.iter_mut().zip(&x) {
            b.re = v;
        }
        fft_pow2(&mut buf, false);
        for b in buf.iter_mut() {
            *b = Complex64::new(b.norm_sqr(), 0.0);
        }
        fft_pow2(&mut buf, true);
        let scale = 1.0 / (m as f64 * n as f64);
        buf[..=maxlag].iter().map(|c| c.re * scale).collect()
    };
    if !(values[0] > 0.0) {
        return Err(domain("constant series: the sample variance is zero"));
    }
    Ok(CovSeq {
        values,
        provenance: Provenance::Empirical { n },
        model: format!("empirical(n={n})"),
    })
}

/// `I(λ_j) = |Σ (x_t - x̄) e^{-itλ_j}|² / (2πn)` at `λ_j = 2πj/n`,
/// `j = 1..=⌊n/2⌋`.
pub fn periodogram(series: &[f64]) -> Result<SpectralGrid> {
    let n = series.len();
    if n < 16 {
        return Err(domain("the periodogram needs at least 16 observations"));
    }
    let x: Vec<Complex64> = centered(series)
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    let spec = dft(&x);
    let half = n / 2;
    let freqs = (1..=half).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let values = spec[1..=half]
        .iter()
        .map(|c| c.norm_sqr() / (2.0 * PI * n as f64))
        .collect();
    Ok(SpectralGrid {
        freqs,
        values,
        meta: format!("periodogram(n={n})"),
    })
}

/// `-2 log|1 - e^{iλ}| = -2 log|2 sin(λ/2)|`.
fn memory_regressor(lambda: f64) -> f64 {
    -2.0 * log(fabs(2.0 * sin(lambda / 2.0)))
}

fn log_ordinates(grid: &SpectralGrid, count: usize) -> Result<Vec<f64>> {
    grid.values[..count]
        .iter()
        .map(|&v| {
            if v > 0.0 {
                Ok(log(v))
            } else {
                Err(domain("zero periodogram ordinate"))
            }
        })
        .collect()
}

/// Geweke–Porter-Hudak regression over the first `m` Fourier frequencies.
pub fn gph(series: &[f64], m: usize) -> Result<EstimateResult> {
    let n = series.len();
    if m < 2 || m > n / 2 {
        return Err(domain(format!("bandwidth m = {m} must lie in [2, n/2]")));
    }
    let grid = periodogram(series)?;
    let y = log_ordinates(&grid, m)?;
    let design: Vec<f64> = grid.freqs[..m]
        .iter()
        .flat_map(|&l| [memory_regressor(l), 1.0])
        .collect();
    let fit = least_squares(&design, m, 2, &y)?;
    let stderr = PI / sqrt(24.0 * m as f64);
    Ok(EstimateResult::new(fit.coef[0], stderr, Method::Gph, m, n))
}

/// FEXP regression over all Fourier frequencies with a cosine short-memory
/// part of order `p`.
pub fn fexp(series: &[f64], p: usize) -> Result<EstimateResult> {
    let n = series.len();
    if p > 20 {
        return Err(domain(format!("FEXP order {p} must lie in [0, 20]")));
    }
    let grid = periodogram(series)?;
    let rows = grid.freqs.len();
    let cols = p + 2;
    let y = log_ordinates(&grid, rows)?;
    let mut design = Vec::with_capacity(rows * cols);
    for &l in &grid.freqs {
        design.push(memory_regressor(l));
        design.push(1.0);
        for k in 1..=p {
            design.push(cos(k as f64 * l));
        }
    }
    let fit = least_squares(&design, rows, cols, &y)?;
    let stderr = sqrt(LOG_PERIODOGRAM_VAR * fit.xtx_inv[0]);
    Ok(EstimateResult::new(fit.coef[0], stderr, Method::Fexp, p, n))
}
