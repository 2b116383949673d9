//! Covariance of the sampled process `Y_n = X_{T_n}`:
//! `σ_Y(h) = E σ_X(T_h) = Σ_j σ_X(j) S^{*h}(j)`, computed exactly and by
//! Monte Carlo, plus the memory-regime prediction and decay fits.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::{log, pow};

use crate::error::{domain, Error, Result};
use crate::math::linalg::simple_regression;
use crate::math::{mean_sd, pairwise_dot};
use crate::procgen::{frac_acvf_seq, FarimaAcvf, FarimaSpec};
use crate::rng::{derive_seed, stream, tag};
use crate::samplaw::{to_table, PowerStepper, SamplingLaw, DEFAULT_TABLE_BUDGET};

/// Where a covariance sequence came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Exact,
    MonteCarlo { reps: usize, se: Vec<f64> },
    Empirical { n: usize },
}

/// Covariances at lags `0..=H`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovSeq {
    pub values: Vec<f64>,
    pub provenance: Provenance,
    pub model: String,
}

impl CovSeq {
    pub fn exact(values: Vec<f64>, model: impl Into<String>) -> Self {
        Self {
            values,
            provenance: Provenance::Exact,
            model: model.into(),
        }
    }

    pub fn max_lag(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// Monotone bound `|σ(j)| ≤ bound(j)` for `j ≥ 1`, non-increasing in `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// `c j^{-alpha}`
    Power { c: f64, alpha: f64 },
    /// `c rate^j`, `0 ≤ rate < 1`
    Geometric { c: f64, rate: f64 },
}

impl Envelope {
    pub fn bound(&self, j: f64) -> f64 {
        match *self {
            Envelope::Power { c, alpha } => c * pow(j.max(1.0), -alpha),
            Envelope::Geometric { c, rate } => c * pow(rate, j.max(1.0)),
        }
    }
}

/// An autocovariance `j ↦ σ_X(j)` with an optional tail envelope.
pub trait Autocov: Sync {
    fn at(&self, j: u64) -> f64;

    fn table(&self, len: usize) -> Vec<f64> {
        (0..len as u64).map(|j| self.at(j)).collect()
    }

    fn envelope(&self) -> Option<Envelope>;
}

/// Closure-backed autocovariance.
pub struct FnAutocov<F> {
    pub f: F,
    pub envelope: Option<Envelope>,
}

impl<F: Fn(u64) -> f64 + Sync> Autocov for FnAutocov<F> {
    fn at(&self, j: u64) -> f64 {
        (self.f)(j)
    }

    fn envelope(&self) -> Option<Envelope> {
        self.envelope
    }
}

/// FARIMA autocovariance with its envelope.
pub struct FarimaCov {
    acvf: FarimaAcvf,
    spec: FarimaSpec,
    envelope: Envelope,
}

impl FarimaCov {
    pub fn new(spec: &FarimaSpec) -> Result<Self> {
        let acvf = FarimaAcvf::new(spec)?;
        let envelope = farima_envelope(spec, &acvf);
        Ok(Self {
            acvf,
            spec: spec.clone(),
            envelope,
        })
    }

    pub fn spec(&self) -> &FarimaSpec {
        &self.spec
    }
}

impl Autocov for FarimaCov {
    fn at(&self, j: u64) -> f64 {
        self.acvf.at(j)
    }

    fn table(&self, len: usize) -> Vec<f64> {
        if self.spec.is_fractional_only() && len > 0 {
            let mut t = frac_acvf_seq(self.spec.d, len - 1);
            for v in &mut t {
                *v *= self.spec.noise_var;
            }
            return t;
        }
        (0..len as u64).map(|j| self.acvf.at(j)).collect()
    }

    fn envelope(&self) -> Option<Envelope> {
        Some(self.envelope)
    }
}

/// For FARIMA(0, d, 0), Wendel's inequality `Γ(h+d)/Γ(h+1-d) ≤ (h-d)^{2d-1}`
/// and `(h-d)/h ≥ 1-d` give the constant at `h = 1`. With ARMA factors the
/// constant is the observed supremum over a window, inflated by 5%.
fn farima_envelope(spec: &FarimaSpec, acvf: &FarimaAcvf) -> Envelope {
    let d = spec.d;
    if spec.is_fractional_only() {
        if d == 0.0 {
            return Envelope::Geometric { c: 0.0, rate: 0.0 };
        }
        let c0 = libm::exp(
            crate::math::special::ln_gamma(1.0 - 2.0 * d)
                - crate::math::special::ln_gamma(d)
                - crate::math::special::ln_gamma(1.0 - d),
        );
        return Envelope::Power {
            c: spec.noise_var * c0 * pow(1.0 - d, 2.0 * d - 1.0),
            alpha: 1.0 - 2.0 * d,
        };
    }
    if d == 0.0 {
        // geometric decay at the largest AR root modulus
        let mut t: Vec<f64> = spec.ar_coeffs.clone();
        while t.last() == Some(&0.0) {
            t.pop();
        }
        let rate = crate::math::linalg::monic_roots(&t)
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        let rate = (rate + (1.0 - rate) * 0.05).min(1.0 - 1e-9);
        let q = spec.ma_coeffs.len() as u64;
        let mut c = 0.0f64;
        for j in 1..=(q + 200) {
            c = c.max(acvf.at(j).abs() / pow(rate, j as f64));
        }
        return Envelope::Geometric { c: c * 1.05, rate };
    }
    let alpha = 1.0 - 2.0 * d;
    let mut c = 0.0f64;
    let mut j = 1u64;
    while j <= 1 << 24 {
        c = c.max(acvf.at(j).abs() * pow(j as f64, alpha));
        j = if j < 2000 { j + 1 } else { j * 2 };
    }
    Envelope::Power { c: c * 1.05, alpha }
}

/// Detailed result of [`sampled_cov_exact_lags`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCov {
    pub lags: Vec<u64>,
    pub values: Vec<f64>,
    /// certified bound on the truncation error of each value
    pub error_bounds: Vec<f64>,
    /// table cut `J` used for the convolution powers
    pub cut: usize,
}

/// `σ_Y(h)` to absolute accuracy `tol`.
pub fn sampled_cov_exact(
    sigma_x: &dyn Autocov,
    law: &SamplingLaw,
    h: u64,
    tol: f64,
) -> Result<f64> {
    Ok(sampled_cov_exact_lags(sigma_x, law, &[h], tol, DEFAULT_TABLE_BUDGET)?.values[0])
}

/// `σ_Y(h)` for every lag in `lags`, sharing the convolution powers.
///
/// The sum `Σ_{j ≤ J} σ_X(j) S^{*h}(j)` is exact on the truncated support;
/// the neglected part is at most `P(T_h > J) · env(J + 1)`, and `J` is
/// doubled until that is below `tol` for every lag.
pub fn sampled_cov_exact_lags(
    sigma_x: &dyn Autocov,
    law: &SamplingLaw,
    lags: &[u64],
    tol: f64,
    budget: usize,
) -> Result<ExactCov> {
    law.validate()?;
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let mut order: Vec<usize> = (0..lags.len()).collect();
    order.sort_by_key(|&i| lags[i]);
    let h_max = lags.iter().copied().max().unwrap_or(0);
    let mut values = vec![0.0; lags.len()];
    let mut bounds = vec![0.0; lags.len()];
    if let SamplingLaw::Dirac(k) = law {
        for (i, &h) in lags.iter().enumerate() {
            values[i] = sigma_x.at(k * h);
        }
        return Ok(ExactCov {
            lags: lags.to_vec(),
            values,
            error_bounds: bounds,
            cut: (k * h_max) as usize,
        });
    }
    let exact_cut = law.max_support().map(|m| (m * h_max) as usize);
    let env = sigma_x.envelope();
    let mut cut = match (exact_cut, env) {
        (Some(c), _) if c < budget => c.max(1),
        (_, None) => {
            return Err(domain(
                "an envelope for σ_X is required with an unbounded sampling law",
            ))
        }
        (_, Some(e)) => initial_cut(law, h_max, tol, &e).min(budget - 1),
    };
    'grow: loop {
        let sig = sigma_x.table(cut + 1);
        let mut stepper = PowerStepper::new(law, cut);
        let mut cur = vec![0.0; cut + 1];
        cur[0] = 1.0;
        let mut at_h = 0u64;
        for &i in &order {
            let h = lags[i];
            if h == 0 {
                values[i] = sig[0];
                bounds[i] = 0.0;
                continue;
            }
            if h != at_h {
                cur = stepper.advance(&cur, h - at_h);
                at_h = h;
            }
            let table = to_table(&cur, h);
            let tail_bound = if exact_cut.is_some_and(|c| c <= cut) {
                0.0
            } else {
                let e = env.expect("envelope checked above");
                table.tail_mass * e.bound(cut as f64 + 1.0)
            };
            if tail_bound > tol {
                if cut + 1 >= budget {
                    return Err(Error::Resource(format!(
                        "σ_Y({h}) needs more than {budget} table entries for tolerance {tol:e} (reached {tail_bound:e})"
                    )));
                }
                cut = (2 * cut + 1).min(budget - 1);
                continue 'grow;
            }
            let start = h as usize;
            values[i] = if start <= cut {
                pairwise_dot(&sig[start..], &cur[start..])
            } else {
                0.0
            };
            bounds[i] = tail_bound;
        }
        return Ok(ExactCov {
            lags: lags.to_vec(),
            values,
            error_bounds: bounds,
            cut,
        });
    }
}

/// Smallest power-of-two-minus-one cut whose heuristic tail estimate
/// `P(T_h > J) ≈ min(1, h P(Δ > J))` times the envelope is below `tol/2`.
/// The certified check in [`sampled_cov_exact_lags`] doubles it if needed.
fn initial_cut(law: &SamplingLaw, h: u64, tol: f64, env: &Envelope) -> usize {
    let hf = h as f64;
    let bulk = match law {
        SamplingLaw::ParetoTail(g) if *g > 2.0 => 2.0 * hf * law.mean(),
        SamplingLaw::ParetoTail(g) => 2.0 * pow(hf, 1.0 / (g - 1.0)),
        _ => 2.0 * hf * law.mean(),
    };
    let mut cut = 63usize.max(bulk as usize);
    cut = (cut + 1).next_power_of_two() - 1;
    while cut < (1 << 40) {
        let tail = (hf * law.tail(cut as u64 + 1)).min(1.0);
        if tail * env.bound(cut as f64 + 1.0) <= tol / 2.0 {
            break;
        }
        cut = 2 * cut + 1;
    }
    cut
}

/// Monte Carlo estimate of `E σ_X(T_h)` over `reps` independent walks:
/// `(mean, standard error)`.
pub fn sampled_cov_mc(
    sigma_x: &dyn Autocov,
    law: &SamplingLaw,
    h: u64,
    reps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    law.validate()?;
    if reps < 100 {
        return Err(domain("Monte Carlo needs at least 100 replications"));
    }
    if let SamplingLaw::Dirac(k) = law {
        return Ok((sigma_x.at(k.saturating_mul(h)), 0.0));
    }
    let mut xs = Vec::with_capacity(reps);
    for r in 0..reps {
        let mut rng = stream(derive_seed(seed, r as u64, tag::MC));
        let mut t = 0u64;
        for _ in 0..h {
            t = t.saturating_add(law.draw(&mut rng));
        }
        xs.push(sigma_x.at(t));
    }
    let (m, sd) = mean_sd(&xs);
    Ok((m, sd / libm::sqrt(reps as f64)))
}

/// Post-sampling memory regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Preserved,
    Reduced,
    Short,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Preserved => "preserved",
            Regime::Reduced => "reduced",
            Regime::Short => "short",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryPrediction {
    pub regime: Regime,
    /// memory parameter of `Y`; `None` for short memory
    pub d_out: Option<f64>,
    /// decay exponent of `σ_Y(h) ≈ h^{-alpha_out}`
    pub alpha_out: Option<f64>,
}

impl MemoryPrediction {
    /// `d_out`, with zero standing for short memory.
    pub fn d_value(&self) -> f64 {
        self.d_out.unwrap_or(0.0)
    }
}

/// Regime boundaries are compared with this slack so that grid values such
/// as `γ = 1.8` for `d = 0.1` land on the boundary they denote.
const REGIME_SLACK: f64 = 1e-12;

/// Memory of `Y` for a FARIMA input with parameter `d` and sampling law `S`.
pub fn predict_memory(d: f64, law: &SamplingLaw) -> Result<MemoryPrediction> {
    if !(d > 0.0 && d < 0.5) {
        return Err(domain(format!("d = {d} outside (0, 1/2)")));
    }
    law.validate()?;
    let alpha = 1.0 - 2.0 * d;
    let gamma = match law {
        SamplingLaw::ParetoTail(g) if *g <= 2.0 + REGIME_SLACK => *g,
        _ => {
            return Ok(MemoryPrediction {
                regime: Regime::Preserved,
                d_out: Some(d),
                alpha_out: Some(alpha),
            })
        }
    };
    let decay = alpha / (gamma - 1.0);
    if gamma >= 2.0 * (1.0 - d) - REGIME_SLACK {
        let d_out = (d - 1.0 + gamma / 2.0).clamp(0.0, d);
        Ok(MemoryPrediction {
            regime: Regime::Reduced,
            d_out: Some(d_out),
            alpha_out: Some(decay),
        })
    } else {
        Ok(MemoryPrediction {
            regime: Regime::Short,
            d_out: None,
            alpha_out: Some(decay),
        })
    }
}

/// Result of a log-log decay fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub alpha_hat: f64,
    pub intercept: f64,
    pub r2: f64,
    /// lags that entered the regression (non-positive values are dropped)
    pub used_lags: usize,
    pub lag_lo: usize,
    pub lag_hi: usize,
}

/// Least-squares slope of `log σ(h)` on `log h` over `[lag_lo, lag_hi]`.
pub fn fit_decay(cov: &CovSeq, lag_lo: usize, lag_hi: usize) -> Result<DecayFit> {
    if lag_lo == 0 || lag_lo >= lag_hi {
        return Err(domain("need 0 < lag_lo < lag_hi"));
    }
    let hi = lag_hi.min(cov.max_lag());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for h in lag_lo..=hi {
        let v = cov.values[h];
        if v > 0.0 && v.is_finite() {
            xs.push(log(h as f64));
            ys.push(log(v));
        }
    }
    if xs.len() < 10 {
        return Err(domain(format!(
            "only {} positive lags in [{lag_lo}, {hi}]",
            xs.len()
        )));
    }
    let (slope, intercept, r2) = simple_regression(&xs, &ys);
    Ok(DecayFit {
        alpha_hat: -slope,
        intercept,
        r2,
        used_lags: xs.len(),
        lag_lo,
        lag_hi: hi,
    })
}

/// `σ_Y(h) h^{α} / c` for each `h`, which tends to `(E Δ)^{-α}` when
/// `σ_X(h) ~ c h^{-α}` and the mean is finite.
pub fn fini_ratio(
    c: f64,
    alpha: f64,
    law: &SamplingLaw,
    cov_y: &CovSeq,
    hs: &[usize],
) -> Result<Vec<f64>> {
    if !law.mean().is_finite() {
        return Err(domain("the sampling law has an infinite mean"));
    }
    hs.iter()
        .map(|&h| {
            cov_y
                .values
                .get(h)
                .map(|v| v * pow(h as f64, alpha) / c)
                .ok_or_else(|| domain(format!("lag {h} beyond the covariance sequence")))
        })
        .collect()
}
