//! FARIMA and Gegenbauer process models: moving-average coefficients,
//! autocovariances, and Gaussian trajectories.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, sqrt};

use crate::covmap::{CovSeq, Provenance};
use crate::error::{domain, Result};
use crate::math::linalg::monic_roots;
use crate::math::quad::{integrate_singular, At, Breakpoint, QuadConfig};
use crate::math::special::{gamma_ratio, ln_gamma};
use crate::math::{pairwise_dot, pairwise_sum};
use crate::rng::{derive_seed, stream, tag, NoiseStream};

/// Default moving-average truncation order.
pub const DEFAULT_MA_ORDER: usize = 5000;
/// Largest `n` accepted by [`gen_trajectory_exact`].
pub const EXACT_MAX_N: usize = 4096;

/// FARIMA(p, d, q): `A(L) (I - L)^d X = B(L) ε` with
/// `A(z) = 1 + a_1 z + ... + a_p z^p`, `B(z) = 1 + b_1 z + ... + b_q z^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarimaSpec {
    pub ar_coeffs: Vec<f64>,
    pub ma_coeffs: Vec<f64>,
    pub d: f64,
    pub noise_var: f64,
}

impl FarimaSpec {
    pub fn new(ar_coeffs: Vec<f64>, ma_coeffs: Vec<f64>, d: f64, noise_var: f64) -> Result<Self> {
        let s = Self {
            ar_coeffs,
            ma_coeffs,
            d,
            noise_var,
        };
        s.validate()?;
        Ok(s)
    }

    /// FARIMA(0, d, 0) with unit innovation variance.
    pub fn fractional(d: f64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), d, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.d) {
            return Err(domain(format!("d = {} outside [0, 1/2)", self.d)));
        }
        if !(self.noise_var > 0.0 && self.noise_var.is_finite()) {
            return Err(domain("noise variance must be positive"));
        }
        check_stable(&self.ar_coeffs, "AR")?;
        check_stable(&self.ma_coeffs, "MA")?;
        Ok(())
    }

    pub fn is_fractional_only(&self) -> bool {
        self.ar_coeffs.iter().all(|&a| a == 0.0) && self.ma_coeffs.iter().all(|&b| b == 0.0)
    }

    pub fn descriptor(&self) -> String {
        format!(
            "farima(ar={:?},d={},ma={:?},var={})",
            self.ar_coeffs, self.d, self.ma_coeffs, self.noise_var
        )
    }

    /// Impulse response of `B(L)/A(L)` up to lag `m`.
    pub fn arma_impulse(&self, m: usize) -> Vec<f64> {
        arma_impulse(&self.ar_coeffs, &self.ma_coeffs, m)
    }
}

fn check_stable(c: &[f64], which: &str) -> Result<()> {
    if c.iter().any(|v| !v.is_finite()) {
        return Err(domain(format!("{which} coefficients must be finite")));
    }
    let mut t = c.to_vec();
    while t.last() == Some(&0.0) {
        t.pop();
    }
    if t.is_empty() {
        return Ok(());
    }
    // roots of z^p + a_1 z^{p-1} + ... + a_p are the reciprocals of A's roots
    let worst = monic_roots(&t).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if worst >= 1.0 - 1e-8 {
        return Err(domain(format!(
            "{which} polynomial has a root on or inside the unit circle (reciprocal modulus {worst})"
        )));
    }
    Ok(())
}

fn arma_impulse(ar: &[f64], ma: &[f64], m: usize) -> Vec<f64> {
    let mut phi = vec![0.0; m + 1];
    for j in 0..=m {
        let mut v = if j == 0 {
            1.0
        } else if j <= ma.len() {
            ma[j - 1]
        } else {
            0.0
        };
        for (i, a) in ar.iter().enumerate() {
            if j > i {
                v -= a * phi[j - i - 1];
            }
        }
        phi[j] = v;
    }
    phi
}

/// Generalized fractional model with spectral density
/// `(σ²/2π) |Φ(e^{iλ})|² Π_j |e^{iλ} - e^{iθ_j}|^{-2d_j} |e^{iλ} - e^{-iθ_j}|^{-2d_j}`
/// for `θ_j ∈ (0, π)`, with a single factor `|e^{iλ} - e^{iθ_j}|^{-2d_j}` for
/// `θ_j ∈ {0, π}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GegenbauerSpec {
    pub components: Vec<(f64, f64)>,
    pub arma: Option<FarimaSpec>,
}

impl GegenbauerSpec {
    pub fn new(components: Vec<(f64, f64)>, arma: Option<FarimaSpec>) -> Result<Self> {
        let s = Self { components, arma };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &(theta, d)) in self.components.iter().enumerate() {
            if !(0.0..=PI).contains(&theta) {
                return Err(domain(format!("θ = {theta} outside [0, π]")));
            }
            if !(d > 0.0 && d < 0.5) {
                return Err(domain(format!("d_j = {d} outside (0, 1/2)")));
            }
            for &(other, _) in &self.components[..i] {
                if (other - theta).abs() < 1e-12 {
                    return Err(domain("component frequencies must be distinct"));
                }
            }
        }
        if let Some(a) = &self.arma {
            a.validate()?;
            if a.d != 0.0 {
                return Err(domain(
                    "the ARMA factor of a Gegenbauer model must have d = 0",
                ));
            }
        }
        Ok(())
    }

    pub fn noise_var(&self) -> f64 {
        self.arma.as_ref().map_or(1.0, |a| a.noise_var)
    }

    pub fn descriptor(&self) -> String {
        format!("gegenbauer(components={:?})", self.components)
    }

    /// Singular frequencies in `[0, π]` with their memory exponents.
    pub fn singularities(&self) -> Vec<(f64, f64)> {
        self.components.clone()
    }
}

/// Coefficients `ψ_0..ψ_m` of a causal linear filter.
#[derive(Debug, Clone, PartialEq)]
pub struct MacoeffTable {
    pub coeffs: Vec<f64>,
    pub truncation_m: usize,
    /// Upper bound on `noise_var Σ_{j>m} ψ_j²`.
    pub tail_bound: f64,
    pub noise_var: f64,
}

/// A simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub values: Vec<f64>,
    pub model_id: String,
    pub seed: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Σ_{j>m} ψ_j²` for `(I - L)^{-d}`, using `ψ_j ≤ ψ_m ((j+1)/(m+1))^{d-1}`.
fn frac_tail(d: f64, psi_m: f64, m: usize) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    psi_m * psi_m * (m as f64 + 1.0) / (1.0 - 2.0 * d)
}

/// Coefficients of `(I - L)^{-d}` by `ψ_j = ψ_{j-1}(j - 1 + d)/j`,
/// re-anchored to [`frac_ma_coeff_direct`] every 256 terms.
pub fn frac_ma_coeffs(d: f64, m: usize) -> Result<MacoeffTable> {
    if !(0.0..0.5).contains(&d) {
        return Err(domain(format!("d = {d} outside [0, 1/2)")));
    }
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(1.0);
    for j in 1..=m {
        if j % 256 == 0 && d > 0.0 {
            coeffs.push(frac_ma_coeff_direct(d, j));
        } else {
            let prev = coeffs[j - 1];
            coeffs.push(prev * (j as f64 - 1.0 + d) / j as f64);
        }
    }
    let tail_bound = frac_tail(d, coeffs[m], m);
    Ok(MacoeffTable {
        coeffs,
        truncation_m: m,
        tail_bound,
        noise_var: 1.0,
    })
}

/// `ψ_j = Γ(j + d) / (Γ(d) Γ(j + 1))` evaluated directly.
pub fn frac_ma_coeff_direct(d: f64, j: usize) -> f64 {
    if d == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    gamma_ratio(j as f64, d, 1.0) * libm::exp(-ln_gamma(d))
}

/// Coefficients of `B(L) A(L)^{-1} (I - L)^{-d}`.
pub fn farima_ma_coeffs(spec: &FarimaSpec, m: usize) -> Result<MacoeffTable> {
    spec.validate()?;
    let frac = frac_ma_coeffs(spec.d, m)?;
    if spec.is_fractional_only() {
        return Ok(MacoeffTable {
            noise_var: spec.noise_var,
            tail_bound: frac.tail_bound * spec.noise_var,
            ..frac
        });
    }
    let ext = 2 * m + 2;
    let phi = spec.arma_impulse(ext);
    let coeffs = crate::math::fft::convolve_truncated(&frac.coeffs, &phi[..=m], m + 1);
    // |c_j| ≤ Φ₁ ψ_{⌈j/2⌉} + R(⌊j/2⌋), R(k) = Σ_{i>k} |φ_i|
    let phi1: f64 = phi.iter().map(|v| v.abs()).sum();
    let mut r_suffix = vec![0.0; ext + 2];
    for i in (0..=ext).rev() {
        r_suffix[i] = r_suffix[i + 1] + phi[i].abs();
    }
    let i0 = (m + 2) / 2;
    let psi_i0 = frac_ma_coeff_direct(spec.d, i0);
    let frac_part = 2.0 * (psi_i0 * psi_i0 + frac_tail(spec.d, psi_i0, i0));
    let mut arma_part = 0.0;
    for j in (m + 1)..=ext {
        let r = r_suffix[j / 2 + 1];
        arma_part += r * r;
    }
    let tail_bound = spec.noise_var * 2.0 * (phi1 * phi1 * frac_part + arma_part);
    Ok(MacoeffTable {
        coeffs,
        truncation_m: m,
        tail_bound,
        noise_var: spec.noise_var,
    })
}

/// Autocovariance of FARIMA(0, d, 0) with unit innovation variance, at any
/// lag, in `O(1)`.
pub fn frac_acvf(d: f64, h: u64) -> f64 {
    if d == 0.0 {
        return if h == 0 { 1.0 } else { 0.0 };
    }
    let c = libm::exp(ln_gamma(1.0 - 2.0 * d) - ln_gamma(d) - ln_gamma(1.0 - d));
    c * gamma_ratio(h as f64, d, 1.0 - d)
}

/// `σ(0), ..., σ(maxlag)` of FARIMA(0, d, 0) by the ratio recursion,
/// re-anchored to [`frac_acvf`] every 64 lags to stop rounding drift.
pub fn frac_acvf_seq(d: f64, maxlag: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(maxlag + 1);
    let s0 = libm::exp(ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d));
    out.push(s0);
    for h in 1..=maxlag {
        let hf = h as f64;
        if h % 64 == 0 {
            out.push(frac_acvf(d, h as u64));
        } else {
            let prev = out[h - 1];
            out.push(prev * (hf - 1.0 + d) / (hf - d));
        }
    }
    out
}

/// Random-access autocovariance of a FARIMA model.
///
/// For ARMA factors, `σ_X(h) = σ² Σ_u c_u σ_W(h + u)` where `σ_W` is the
/// FARIMA(0, d, 0) autocovariance and `c_u = Σ_k φ_k φ_{k+|u|}` the
/// autocovariance of the ARMA impulse response.
#[derive(Debug, Clone)]
pub struct FarimaAcvf {
    d: f64,
    noise_var: f64,
    /// `c_0, c_1, ...` (symmetric in `u`); empty for the fractional-only case.
    arma_acf: Vec<f64>,
}

impl FarimaAcvf {
    pub fn new(spec: &FarimaSpec) -> Result<Self> {
        spec.validate()?;
        let arma_acf = if spec.is_fractional_only() {
            Vec::new()
        } else {
            let mut len = 256;
            let phi = loop {
                let phi = spec.arma_impulse(len);
                let tail: f64 = phi[len / 2..].iter().map(|v| v.abs()).sum();
                let head: f64 = phi.iter().map(|v| v.abs()).sum();
                if tail <= 1e-17 * head || len >= 1 << 20 {
                    break phi;
                }
                len *= 2;
            };
            let mut c = vec![0.0; phi.len()];
            for (u, cu) in c.iter_mut().enumerate() {
                *cu = pairwise_dot(&phi[..phi.len() - u], &phi[u..]);
            }
            while c.len() > 1 && c.last().is_some_and(|v| v.abs() < 1e-300) {
                c.pop();
            }
            c
        };
        Ok(Self {
            d: spec.d,
            noise_var: spec.noise_var,
            arma_acf,
        })
    }

    pub fn at(&self, h: u64) -> f64 {
        if self.arma_acf.is_empty() {
            return self.noise_var * frac_acvf(self.d, h);
        }
        let base = |k: i64| frac_acvf(self.d, k.unsigned_abs());
        let h = h as i64;
        let mut terms = Vec::with_capacity(2 * self.arma_acf.len());
        terms.push(self.arma_acf[0] * base(h));
        for (u, &cu) in self.arma_acf.iter().enumerate().skip(1) {
            let u = u as i64;
            terms.push(cu * (base(h + u) + base(h - u)));
        }
        self.noise_var * pairwise_sum(&terms)
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// `σ(0..=maxlag)` of a FARIMA model.
pub fn farima_autocov(spec: &FarimaSpec, maxlag: usize) -> Result<CovSeq> {
    spec.validate()?;
    let values = if spec.is_fractional_only() {
        frac_acvf_seq(spec.d, maxlag)
            .into_iter()
            .map(|v| v * spec.noise_var)
            .collect()
    } else {
        let acvf = FarimaAcvf::new(spec)?;
        (0..=maxlag as u64).map(|h| acvf.at(h)).collect()
    };
    Ok(CovSeq {
        values,
        provenance: Provenance::Exact,
        model: spec.descriptor(),
    })
}

/// `σ(h) = ∫_{-π}^{π} e^{ihλ} f(λ) dλ` for a Gegenbauer model.
pub fn gegenbauer_autocov(
    spec: &GegenbauerSpec,
    maxlag: usize,
    quad: &QuadConfig,
) -> Result<CovSeq> {
    spec.validate()?;
    let mut pts: Vec<Breakpoint> = vec![Breakpoint::regular(0.0), Breakpoint::regular(PI)];
    for &(theta, d) in &spec.components {
        let e = 2.0 * d;
        if theta == 0.0 {
            pts[0] = Breakpoint::singular(0.0, e);
        } else if theta == PI {
            pts[1] = Breakpoint::singular(PI, e);
        } else {
            pts.push(Breakpoint::singular(theta, e));
        }
    }
    pts.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut values = Vec::with_capacity(maxlag + 1);
    for h in 0..=maxlag {
        let cfg = QuadConfig {
            initial_panels: quad.initial_panels.max(1 + h / 8),
            ..*quad
        };
        // even density: σ(h) = 2 ∫_0^π cos(hλ) f(λ) dλ
        let r = integrate_singular(
            |at: At| 2.0 * cos(h as f64 * at.x()) * crate::specmap::gegenbauer_sd_at(spec, at),
            &pts,
            &cfg,
        )?;
        values.push(r.value);
    }
    Ok(CovSeq {
        values,
        provenance: Provenance::Exact,
        model: spec.descriptor(),
    })
}

/// `X_t = Σ_{j=0}^{m} ψ_j ε_{t-j}`, `t = 0..n-1`.
pub fn gen_trajectory_ma(coeffs: &MacoeffTable, n: usize, seed: u64) -> Trajectory {
    let indices: Vec<u64> = (0..n as u64).collect();
    Trajectory {
        values: gen_at_indices(coeffs, &indices, seed),
        model_id: format!("ma(m={})", coeffs.truncation_m),
        seed,
    }
}

/// Values of the moving-average trajectory at sorted `indices`, bit-identical
/// to [`gen_trajectory_ma`] restricted to those times.
///
/// Noise is regenerated per block of nearby indices, so memory stays
/// `O(m)` however sparse the indices are.
pub fn gen_at_indices(coeffs: &MacoeffTable, indices: &[u64], seed: u64) -> Vec<f64> {
    assert!(
        indices.windows(2).all(|w| w[0] < w[1]),
        "indices must be strictly increasing"
    );
    let psi_rev: Vec<f64> = coeffs.coeffs.iter().rev().copied().collect();
    let m = psi_rev.len() - 1;
    let scale = sqrt(coeffs.noise_var);
    let mut noise = NoiseStream::new(seed);
    let mut out = Vec::with_capacity(indices.len());
    // window holds ε_lo, ..., ε_{lo + buf.len() - 1}
    let block = (4 * (m + 1)).max(4096) as u64;
    let mut buf: Vec<f64> = Vec::new();
    let mut lo: i64 = 0;
    for (pos, &t) in indices.iter().enumerate() {
        let ti = t as i64;
        if buf.is_empty() || ti >= lo + buf.len() as i64 {
            // cover every upcoming index within `block` of t
            let mut end = t;
            for &u in &indices[pos + 1..] {
                if u > t + block {
                    break;
                }
                end = u;
            }
            lo = ti - m as i64;
            buf.resize((end - t) as usize + m + 1, 0.0);
            noise.fill(lo, &mut buf);
        }
        let off = (ti - lo) as usize;
        out.push(scale * dot8(&psi_rev, &buf[off - m..=off]));
    }
    out
}

/// Dot product with eight interleaved partial sums in a fixed order.
fn dot8(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Gaussian vector with Toeplitz covariance `cov[|i - j|]` by the
/// Durbin–Levinson recursion.
pub fn gen_trajectory_exact(cov: &CovSeq, n: usize, seed: u64) -> Result<Trajectory> {
    if n == 0 || n > EXACT_MAX_N {
        return Err(domain(format!("exact sampler needs 1 ≤ n ≤ {EXACT_MAX_N}")));
    }
    if cov.values.len() < n {
        return Err(domain("covariance sequence shorter than n"));
    }
    let g0 = cov.values[0];
    if !(g0 > 0.0) {
        return Err(domain("σ(0) must be positive"));
    }
    let (phis, vars) = match durbin_levinson(&cov.values[..n], 0.0) {
        Ok(v) => v,
        Err(_) => durbin_levinson(&cov.values[..n], 1e-10 * g0)?,
    };
    let mut rng = stream(derive_seed(seed, 0, tag::EXACT));
    let mut x = Vec::with_capacity(n);
    for t in 0..n {
        let coef = &phis[t];
        let mut mean = 0.0;
        for (k, c) in coef.iter().enumerate() {
            mean += c * x[t - 1 - k];
        }
        x.push(mean + sqrt(vars[t]) * crate::rng::standard_normal(&mut rng));
    }
    Ok(Trajectory {
        values: x,
        model_id: cov.model.clone(),
        seed,
    })
}

type Predictors = (Vec<Vec<f64>>, Vec<f64>);

fn durbin_levinson(g: &[f64], jitter: f64) -> Result<Predictors> {
    let n = g.len();
    let g0 = g[0] + jitter;
    let mut phis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut vars = Vec::with_capacity(n);
    phis.push(Vec::new());
    vars.push(g0);
    let mut v = g0;
    for t in 1..n {
        let prev = &phis[t - 1];
        let mut num = g[t];
        for (k, c) in prev.iter().enumerate() {
            num -= c * g[t - 1 - k];
        }
        let kappa = num / v;
        let mut next = Vec::with_capacity(t);
        for k in 0..t - 1 {
            next.push(prev[k] - kappa * prev[t - 2 - k]);
        }
        next.push(kappa);
        v *= 1.0 - kappa * kappa;
        if !(v > 0.0) || kappa.abs() >= 1.0 {
            return Err(domain(
                "covariance is not positive definite as a Toeplitz matrix",
            ));
        }
        phis.push(next);
        vars.push(v);
    }
    Ok((phis, vars))
}
