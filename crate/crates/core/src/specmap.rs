//! Spectral densities, deterministic aliasing, singularity folding, and the
//! Poisson-kernel route to the spectrum of a randomly sampled process.
//!
//! Densities are normalized so that `∫_{-π}^{π} f = σ(0)`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, fabs, log, pow, sin};

use crate::error::{domain, numeric, Result};
use crate::math::linalg::{least_squares, simple_regression};
use crate::math::quad::{
    gauss_legendre, integrate_singular, At, Breakpoint, QuadConfig, ANCHOR_SNAP,
};
use crate::math::Complex64;
use crate::procgen::{FarimaSpec, GegenbauerSpec};
use crate::samplaw::{wrap_pi, CharFn, SamplingLaw};

/// Tabulated density on `(0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: String,
}

impl SpectralGrid {
    /// `n` equispaced frequencies `πk/n`, `k = 1..=n`.
    pub fn tabulate<F: FnMut(f64) -> Result<f64>>(
        mut f: F,
        n: usize,
        meta: impl Into<String>,
    ) -> Result<Self> {
        let freqs: Vec<f64> = (1..=n).map(|k| PI * k as f64 / n as f64).collect();
        let values = freqs.iter().map(|&l| f(l)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            freqs,
            values,
            meta: meta.into(),
        })
    }
}

/// Singular frequencies in `[0, π]` with memory exponents `d` (the density
/// behaves like `|λ - freq|^{-2d}`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SingularitySet {
    pub entries: Vec<(f64, f64)>,
}

/// Merge tolerance for folded frequencies.
pub const MERGE_TOL: f64 = 1e-9;

impl SingularitySet {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(f, d)) in entries.iter().enumerate() {
            if !(0.0..=PI).contains(&f) {
                return Err(domain(format!("singular frequency {f} outside [0, π]")));
            }
            if !(d > 0.0 && d < 0.5) {
                return Err(domain(format!("memory exponent {d} outside (0, 1/2)")));
            }
            if entries[..i].iter().any(|&(g, _)| fabs(g - f) <= MERGE_TOL) {
                return Err(domain("singular frequencies must be distinct"));
            }
        }
        let mut entries = entries;
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exponent at `freq`, if it is singular.
    pub fn exponent_at(&self, freq: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|(f, _)| fabs(f - freq) <= MERGE_TOL)
            .map(|&(_, d)| d)
    }
}

/// An even spectral density on `[-π, π]` with known singularities.
pub trait SpectralDensity: Sync {
    /// Density at `at.x()`; exact offsets from singular anchors are used.
    fn eval_at(&self, at: At) -> f64;

    fn eval(&self, lambda: f64) -> f64 {
        self.eval_at(At::plain(lambda))
    }

    /// Singular frequencies in `[0, π]` with memory exponents.
    fn singularities(&self) -> Vec<(f64, f64)>;
}

/// Constant density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteDensity(pub f64);

impl SpectralDensity for WhiteDensity {
    fn eval_at(&self, _at: At) -> f64 {
        self.0
    }

    fn singularities(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
}

impl SpectralDensity for FarimaSpec {
    fn eval_at(&self, at: At) -> f64 {
        farima_sd_at(self, at)
    }

    fn singularities(&self) -> Vec<(f64, f64)> {
        if self.d > 0.0 {
            vec![(0.0, self.d)]
        } else {
            Vec::new()
        }
    }
}

impl SpectralDensity for GegenbauerSpec {
    fn eval_at(&self, at: At) -> f64 {
        gegenbauer_sd_at(self, at)
    }

    fn singularities(&self) -> Vec<(f64, f64)> {
        let mut s = self.components.clone();
        s.sort_by(|a, b| a.0.total_cmp(&b.0));
        s
    }
}

/// `|2 sin(δ/2)|` where `δ` is the distance from `at` to `nu`, reduced to
/// `(-π, π]`.
fn chord(at: At, nu: f64) -> f64 {
    let delta = at.dist(nu);
    let delta = if fabs(delta) <= PI {
        delta
    } else {
        wrap_pi(delta)
    };
    fabs(2.0 * sin(delta / 2.0))
}

fn arma_gain(ar: &[f64], ma: &[f64], lambda: f64) -> f64 {
    let poly = |c: &[f64]| {
        let mut v = Complex64::new(1.0, 0.0);
        for (k, &ck) in c.iter().enumerate() {
            let a = (k + 1) as f64 * lambda;
            v += Complex64::new(cos(a), sin(a)) * ck;
        }
        v.norm_sqr()
    };
    poly(ma) / poly(ar)
}

fn singular_anchor(at: At, nu: f64) -> bool {
    fabs(at.anchor - nu) <= ANCHOR_SNAP && at.offset == 0.0
}

/// Reflects `at` into `x ≥ 0`, so that evaluation is exactly even.
fn nonneg(at: At) -> At {
    if at.x() < 0.0 {
        At {
            anchor: -at.anchor,
            offset: -at.offset,
        }
    } else {
        at
    }
}

pub(crate) fn farima_sd_at(spec: &FarimaSpec, at: At) -> f64 {
    let at = nonneg(at);
    let base = spec.noise_var / (2.0 * PI) * arma_gain(&spec.ar_coeffs, &spec.ma_coeffs, at.x());
    if spec.d == 0.0 {
        return base;
    }
    // nearest multiple of 2π is the singular point
    let nu = 2.0 * PI * libm::round(at.anchor / (2.0 * PI));
    if singular_anchor(at, nu) {
        return f64::INFINITY;
    }
    base * pow(chord(at, nu), -2.0 * spec.d)
}

/// `(σ²/2π) |B/A|² |1 - e^{iλ}|^{-2d}`.
pub fn farima_sd(spec: &FarimaSpec, lambda: f64) -> Result<f64> {
    spec.validate()?;
    let v = farima_sd_at(spec, At::plain(lambda));
    if !v.is_finite() {
        return Err(domain(format!("λ = {lambda} is a singular frequency")));
    }
    Ok(v)
}

pub(crate) fn gegenbauer_sd_at(spec: &GegenbauerSpec, at: At) -> f64 {
    let at = nonneg(at);
    let lambda = at.x();
    let mut v = spec.noise_var() / (2.0 * PI);
    if let Some(a) = &spec.arma {
        v *= arma_gain(&a.ar_coeffs, &a.ma_coeffs, lambda);
    }
    for &(theta, d) in &spec.components {
        let poles: &[f64] = if theta == 0.0 || theta == PI {
            &[theta]
        } else {
            &[theta, -theta]
        };
        for &p in poles {
            // also the 2π-shifted copy nearest to the anchor
            let nu = p + 2.0 * PI * libm::round((at.anchor - p) / (2.0 * PI));
            if singular_anchor(at, nu) {
                return f64::INFINITY;
            }
            v *= pow(chord(at, nu), -2.0 * d);
        }
    }
    v
}

/// Product of the generalized fractional factors (see [`GegenbauerSpec`]).
pub fn gegenbauer_sd(spec: &GegenbauerSpec, lambda: f64) -> Result<f64> {
    spec.validate()?;
    let v = gegenbauer_sd_at(spec, At::plain(lambda));
    if !v.is_finite() {
        return Err(domain(format!("λ = {lambda} is a singular frequency")));
    }
    Ok(v)
}

/// Spectral density of `Y_n = X_{kn}`:
/// `f_Y(λ) = (1/k) Σ_j f((λ - 2πj)/k)` over the `k` preimages in `[-π, π)`.
/// For even `k = 2ℓ` the boundary preimage is `j = ℓ sgn(λ)`, `sgn(0) = +1`.
pub fn alias_sd<F: Fn(f64) -> f64>(f: F, k: u64, lambda: f64) -> Result<f64> {
    if k == 0 {
        return Err(domain("decimation factor must be ≥ 1"));
    }
    let kf = k as f64;
    let mut terms = Vec::with_capacity(k as usize);
    for j in alias_indices(k, lambda) {
        terms.push(f((lambda - 2.0 * PI * j as f64) / kf));
    }
    let s: f64 = terms.iter().sum::<f64>() / kf;
    if !s.is_finite() {
        return Err(domain(format!("λ = {lambda} maps onto a singularity")));
    }
    Ok(s)
}

fn alias_indices(k: u64, lambda: f64) -> Vec<i64> {
    let k = k as i64;
    if k % 2 == 1 {
        let l = (k - 1) / 2;
        (-l..=l).collect()
    } else {
        let l = k / 2;
        let mut v: Vec<i64> = (-l + 1..l).collect();
        v.push(if lambda >= 0.0 { l } else { -l });
        v
    }
}

/// [`alias_sd`] as a density, with folded singularities.
pub struct AliasedDensity<'a> {
    pub inner: &'a dyn SpectralDensity,
    pub k: u64,
}

impl SpectralDensity for AliasedDensity<'_> {
    fn eval_at(&self, at: At) -> f64 {
        let kf = self.k as f64;
        let lambda = at.x();
        alias_indices(self.k, lambda)
            .into_iter()
            .map(|j| {
                let shift = 2.0 * PI * j as f64;
                self.inner.eval_at(At {
                    anchor: (at.anchor - shift) / kf,
                    offset: at.offset / kf,
                })
            })
            .sum::<f64>()
            / kf
    }

    fn singularities(&self) -> Vec<(f64, f64)> {
        let set = SingularitySet {
            entries: self.inner.singularities(),
        };
        fold_singularities(&set, self.k).entries
    }
}

/// Images of singular frequencies under decimation by `k`: `λ ↦ |wrap(kλ)|`,
/// merging coincident images and keeping the largest exponent.
pub fn fold_singularities(sings: &SingularitySet, k: u64) -> SingularitySet {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(f, d) in &sings.entries {
        let img = fabs(wrap_pi(k as f64 * f));
        // ±π are the same point
        let img = if PI - img <= MERGE_TOL {
            PI
        } else if img <= MERGE_TOL {
            0.0
        } else {
            img
        };
        match out.iter_mut().find(|(g, _)| fabs(*g - img) <= MERGE_TOL) {
            Some(e) => e.1 = e.1.max(d),
            None => out.push((img, d)),
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    SingularitySet { entries: out }
}

/// Estimated `d` from `f(λ0 + δ) ≈ c δ^{-2d}`: minus half the log-log slope.
pub fn local_exponent<F: Fn(f64) -> f64>(f: F, lambda0: f64, offsets: &[f64]) -> Result<f64> {
    if offsets.len() < 2 || offsets.iter().any(|&o| !(o > 0.0)) {
        return Err(domain("need at least two positive offsets"));
    }
    let mut xs = Vec::with_capacity(offsets.len());
    let mut ys = Vec::with_capacity(offsets.len());
    for &o in offsets {
        let v = f(lambda0 + o);
        if !(v.is_finite() && v > 0.0) {
            return Err(domain(format!(
                "density is not finite and positive at offset {o}"
            )));
        }
        xs.push(log(o));
        ys.push(log(v));
    }
    let (slope, _, _) = simple_regression(&xs, &ys);
    Ok(-slope / 2.0)
}

/// `P_s(t) = (1/2π)(1 - s²)/(1 - 2s cos t + s²)`.
pub fn poisson_kernel(s: f64, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(domain(format!("Poisson kernel needs 0 ≤ s < 1, got {s}")));
    }
    Ok(poisson_stable(1.0 - s * s, s, t))
}

/// Kernel from `1 - s²` (given without cancellation) and `s`.
#[inline]
fn poisson_stable(one_minus_s2: f64, s: f64, t: f64) -> f64 {
    let one_minus_s = one_minus_s2 / (1.0 + s);
    let h = sin(t / 2.0);
    one_minus_s2 / (2.0 * PI * (one_minus_s * one_minus_s + 4.0 * s * h * h))
}

/// Value of `g(r, θ)` with its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub r: f64,
    pub theta: f64,
    /// `g(r, θ)` in the Poisson form.
    pub value: f64,
    /// `∫ f(λ) P_{rρ}(τ - θ) dλ = (1/2π) Σ_h r^{|h|} σ_Y(h) e^{-ihθ}`, the Abel
    /// mean of `f_Y`. Equals `2 value - σ_X(0)/2π`.
    pub smoothed: f64,
    pub quad_error: f64,
}

/// Default accuracy for `g(r, θ)`.
pub fn default_kernel_quad() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_intervals: 40_000,
        initial_panels: 4,
    }
}

/// Precomputed pieces of `g(r, θ)` for one `(f, S, θ)`: the characteristic
/// function and the breakpoints where `τ(λ) ≡ ±θ`, near which the kernel
/// peaks as `rρ → 1`.
pub struct KernelSetup<'a> {
    f: &'a dyn SpectralDensity,
    cf: CharFn,
    theta: f64,
    points: Vec<Breakpoint>,
    /// `(1/2π) ∫_0^π f`, the `r`-independent part of `g`.
    mass: f64,
    mass_error: f64,
}

impl<'a> KernelSetup<'a> {
    pub fn new(f: &'a dyn SpectralDensity, law: &SamplingLaw, theta: f64) -> Result<Self> {
        law.validate()?;
        if law.is_dirac() {
            return Err(domain(
                "the Poisson representation needs a non-degenerate law",
            ));
        }
        if !(theta.is_finite() && fabs(theta) < PI) {
            return Err(domain("θ must lie in (-π, π)"));
        }
        let theta = fabs(theta);
        let cf = law.char_fn_evaluator();
        let mut points = vec![Breakpoint::regular(0.0), Breakpoint::regular(PI)];
        for (freq, d) in f.singularities() {
            let bp = Breakpoint::singular(freq, 2.0 * d);
            if freq == 0.0 {
                points[0] = bp;
            } else if freq == PI {
                points[1] = bp;
            } else {
                points.push(bp);
            }
        }
        for x in kernel_peaks(&cf, theta) {
            if points.iter().all(|p| fabs(p.x - x) > 1e-13 * (1.0 + x)) {
                points.push(Breakpoint::regular(x));
            }
        }
        points.sort_by(|a, b| a.x.total_cmp(&b.x));
        let m = integrate_singular(|at: At| f.eval_at(at), &points, &default_kernel_quad())?;
        Ok(Self {
            f,
            cf,
            theta,
            points,
            mass: m.value / (2.0 * PI),
            mass_error: m.error / (2.0 * PI),
        })
    }

    /// `g(r, θ) = (1/2) ∫_0^π f(λ)(1/π + P_{rρ}(τ - θ) + P_{rρ}(τ + θ)) dλ`.
    ///
    /// The kernel part is integrated on its own so that `smoothed` carries
    /// no cancellation against the constant part.
    pub fn eval(&self, r: f64, quad: &QuadConfig) -> Result<KernelEval> {
        if !(0.0..1.0).contains(&r) {
            return Err(domain("r must lie in [0, 1)"));
        }
        let theta = self.theta;
        let res = integrate_singular(
            |at: At| {
                let fv = self.f.eval_at(at);
                if fv == 0.0 {
                    return 0.0;
                }
                let c = self.cf.eval(at.x());
                let one_minus_rho2 = c.one_minus_rho_sq().max(0.0);
                let s = r * c.rho;
                let one_minus_s2 = (1.0 - r * r) + r * r * one_minus_rho2;
                let k = poisson_stable(one_minus_s2, s, c.tau - theta)
                    + poisson_stable(one_minus_s2, s, c.tau + theta);
                fv * k
            },
            &self.points,
            quad,
        )?;
        Ok(KernelEval {
            r,
            theta,
            value: self.mass + 0.5 * res.value,
            smoothed: res.value,
            quad_error: 0.5 * res.error + self.mass_error,
        })
    }
}

/// Points of `(0, π)` where `τ(λ) ≡ ±θ (mod 2π)`, found on a log-plus-linear
/// grid and refined by bisection.
fn kernel_peaks(cf: &CharFn, theta: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut x = 1e-14;
    while x < 1e-2 {
        grid.push(x);
        x *= 1.25;
    }
    let n_lin = 400;
    for i in 0..=n_lin {
        grid.push(1e-2 + (PI - 1e-2) * i as f64 / n_lin as f64);
    }
    let mut out = Vec::new();
    for target in [theta, -theta] {
        let g = |l: f64| wrap_pi(cf.eval(l).tau - target);
        let mut prev = (grid[0], g(grid[0]));
        for &x in &grid[1..] {
            let cur = (x, g(x));
            // a sign change away from the ±π seam is a genuine crossing
            if prev.1 * cur.1 <= 0.0 && fabs(prev.1) < PI / 2.0 && fabs(cur.1) < PI / 2.0 {
                let (mut a, mut b) = (prev.0, cur.0);
                let fa = prev.1;
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if g(m) * fa <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                let root = 0.5 * (a + b);
                if root > 0.0 && root < PI {
                    out.push(root);
                }
            }
            prev = cur;
        }
        if theta == 0.0 {
            break;
        }
    }
    out
}

/// `g(r, θ)` in one call.
pub fn g_r_theta(
    f: &dyn SpectralDensity,
    law: &SamplingLaw,
    r: f64,
    theta: f64,
    quad: &QuadConfig,
) -> Result<KernelEval> {
    KernelSetup::new(f, law, theta)?.eval(r, quad)
}

/// Extrapolated `f_Y(θ)` with its diagnostics.
///
/// `g(r, θ)` itself tends to `f_Y(θ)/2 + σ_X(0)/4π`: the Poisson form is the
/// real part of a one-sided transform. The limit is therefore taken on the
/// Abel mean [`KernelEval::smoothed`].
#[derive(Debug, Clone, PartialEq)]
pub struct SdLimit {
    pub theta: f64,
    pub value: f64,
    pub r_seq: Vec<f64>,
    /// Abel means along `r_seq`.
    pub smoothed: Vec<f64>,
    /// `|g_{k+1} - g_k|`
    pub diffs: Vec<f64>,
    /// fitted exponent `c` in `g ≈ a + b(1 - r)^c`
    pub rate: f64,
}

/// `1 - 2^{-j}`, `j = 3..=12`.
pub fn default_r_seq() -> Vec<f64> {
    (3..=12).map(|j| 1.0 - pow(2.0, -(j as f64))).collect()
}

/// `1 - min(θ, 1) 2^{-j}`, `j = 3..=12`: the smoothing scale `1 - r` stays
/// proportional to the distance from a singularity at the origin.
pub fn relative_r_seq(theta: f64) -> Vec<f64> {
    let scale = fabs(theta).min(1.0);
    (3..=12)
        .map(|j| 1.0 - scale * pow(2.0, -(j as f64)))
        .collect()
}

/// Limit of the Abel means along `r_seq`, extrapolated by fitting
/// `a + b(1 - r)^c` to the last four values.
pub fn sampled_sd_limit(
    f: &dyn SpectralDensity,
    law: &SamplingLaw,
    theta: f64,
    r_seq: &[f64],
    quad: &QuadConfig,
) -> Result<SdLimit> {
    if !(theta > 0.0 && theta < PI) {
        return Err(domain("θ must lie in (0, π)"));
    }
    if r_seq.len() < 4 || r_seq.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("r_seq needs at least four increasing values"));
    }
    let setup = KernelSetup::new(f, law, theta)?;
    let mut g_values = Vec::with_capacity(r_seq.len());
    for &r in r_seq {
        g_values.push(setup.eval(r, quad)?.smoothed);
    }
    let diffs: Vec<f64> = g_values.windows(2).map(|w| fabs(w[1] - w[0])).collect();
    let scale = g_values.last().map_or(1.0, |v| fabs(*v)).max(1e-300);
    let floor = 1e-9 * scale + 10.0 * quad.abs_tol;
    let tail = &diffs[diffs.len() - 3..];
    let shrinking = tail.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor);
    if !shrinking {
        return Err(numeric(
            format!("g(r, {theta}) does not settle as r → 1"),
            *tail.last().unwrap_or(&f64::INFINITY),
        ));
    }
    let n = r_seq.len();
    let xs: Vec<f64> = r_seq[n - 4..].iter().map(|r| 1.0 - r).collect();
    let ys = &g_values[n - 4..];
    let (value, rate) = if diffs[diffs.len() - 1] <= floor {
        (ys[3], f64::NAN)
    } else {
        extrapolate(&xs, ys)
    };
    Ok(SdLimit {
        theta,
        value,
        r_seq: r_seq.to_vec(),
        smoothed: g_values,
        diffs,
        rate,
    })
}

/// Fits `y ≈ a + b x^c` and returns `(a, c)`.
fn extrapolate(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let fit = |c: f64| -> (f64, f64) {
        let design: Vec<f64> = xs.iter().flat_map(|&x| [1.0, pow(x, c)]).collect();
        match least_squares(&design, xs.len(), 2, ys) {
            Ok(f) => (f.coef[0], f.rss),
            Err(_) => (f64::NAN, f64::INFINITY),
        }
    };
    let mut best = (0.25, f64::INFINITY);
    let mut c = 0.25;
    while c <= 4.0 + 1e-12 {
        let (_, rss) = fit(c);
        if rss < best.1 {
            best = (c, rss);
        }
        c += 0.05;
    }
    // golden-section refinement around the grid minimum
    let (mut lo, mut hi) = ((best.0 - 0.05).max(0.2), best.0 + 0.05);
    let phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if fit(m1).1 <= fit(m2).1 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let c = 0.5 * (lo + hi);
    (fit(c).0, c)
}

/// `∫_{-π}^{π} e^{ihθ} f_Y(θ) dθ = 2 ∫_0^π cos(hθ) f_Y(θ) dθ` for each `h`,
/// with `f_Y` from [`sampled_sd_limit`] on the θ-relative schedule.
///
/// The substitution `θ = π u^q`, `q = 1/(1 - e)`, absorbs a singularity
/// `θ^{-e}` at the origin; `u` is integrated by `panels` Gauss–Legendre
/// panels of `order` nodes.
pub fn sampled_sd_fourier(
    f: &dyn SpectralDensity,
    law: &SamplingLaw,
    hs: &[u64],
    origin_exponent: f64,
    panels: usize,
    order: usize,
    quad: &QuadConfig,
) -> Result<Vec<f64>> {
    let q = 1.0 / (1.0 - origin_exponent);
    let (gx, gw) = gauss_legendre(order);
    let mut acc = vec![0.0; hs.len()];
    for p in 0..panels {
        let (u0, u1) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
        for (x, w) in gx.iter().zip(&gw) {
            let u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x;
            let wu = 0.5 * (u1 - u0) * w;
            let theta = PI * pow(u, q);
            let jac = PI * q * pow(u, q - 1.0);
            let fy = sampled_sd_limit(f, law, theta, &relative_r_seq(theta), quad)?.value;
            for (a, &h) in acc.iter_mut().zip(hs) {
                *a += 2.0 * wu * jac * fy * cos(h as f64 * theta);
            }
        }
    }
    Ok(acc)
}

/// Boxed density, for callers that pick a model at run time.
pub type DynDensity = Box<dyn SpectralDensity>;
