//! Sampling-interval laws, random walks of sampling times, convolution
//! powers and characteristic functions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use libm::{cos, floor, pow, sin};
use rand_core::RngCore;

use crate::error::{domain, Error, Result};
use crate::math::fft::{convolve_truncated, RealFft};
use crate::math::special::{power_difference, zeta, UnitPolylog};
use crate::math::{pairwise_sum, Complex64};
use crate::rng::{derive_seed, stream, tag, uniform_open0};

/// Default memory budget for convolution tables (entries).
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 22;

/// Law of the i.i.d. integer sampling intervals `Δ_j ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingLaw {
    /// `Δ = k` almost surely.
    Dirac(u64),
    /// `P(Δ = j) = j^{1-γ} - (j+1)^{1-γ}`, so `P(Δ ≥ x) = x^{1-γ}`.
    ParetoTail(f64),
    /// `pmf[j - 1] = P(Δ = j)`.
    Table(Vec<f64>),
}

impl SamplingLaw {
    pub fn dirac(k: u64) -> Result<Self> {
        let s = Self::Dirac(k);
        s.validate()?;
        Ok(s)
    }

    pub fn pareto(gamma: f64) -> Result<Self> {
        let s = Self::ParetoTail(gamma);
        s.validate()?;
        Ok(s)
    }

    pub fn table(pmf: Vec<f64>) -> Result<Self> {
        let s = Self::Table(pmf);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Dirac(k) if *k >= 1 => Ok(()),
            Self::Dirac(_) => Err(domain("Dirac law needs k ≥ 1")),
            Self::ParetoTail(g) if *g > 1.0 && g.is_finite() => Ok(()),
            Self::ParetoTail(g) => Err(domain(format!("Pareto tail needs γ > 1, got {g}"))),
            Self::Table(p) => {
                if p.is_empty() {
                    return Err(domain("empty pmf table"));
                }
                if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(domain("pmf entries must be finite and non-negative"));
                }
                let s = pairwise_sum(p);
                if (s - 1.0).abs() > 1e-12 {
                    return Err(domain(format!("pmf sums to {s}, not 1")));
                }
                Ok(())
            }
        }
    }

    pub fn is_dirac(&self) -> bool {
        match self {
            Self::Dirac(_) => true,
            Self::Table(p) => p.iter().filter(|v| **v > 0.0).count() == 1,
            Self::ParetoTail(_) => false,
        }
    }

    /// Largest support point, `None` for unbounded support.
    pub fn max_support(&self) -> Option<u64> {
        match self {
            Self::Dirac(k) => Some(*k),
            Self::ParetoTail(_) => None,
            Self::Table(p) => Some(p.iter().rposition(|v| *v > 0.0).map_or(1, |i| i as u64 + 1)),
        }
    }

    /// `P(Δ = j)`.
    pub fn pmf(&self, j: u64) -> Result<f64> {
        if j < 1 {
            return Err(domain("pmf is defined for j ≥ 1"));
        }
        Ok(match self {
            Self::Dirac(k) => f64::from(u8::from(j == *k)),
            Self::ParetoTail(g) => power_difference(j as f64, 1.0 - g),
            Self::Table(p) => p.get(j as usize - 1).copied().unwrap_or(0.0),
        })
    }

    /// `P(Δ ≥ x)`.
    pub fn tail(&self, x: u64) -> f64 {
        if x <= 1 {
            return 1.0;
        }
        match self {
            Self::Dirac(k) => f64::from(u8::from(x <= *k)),
            Self::ParetoTail(g) => pow(x as f64, 1.0 - g),
            Self::Table(p) => {
                let from = (x as usize - 1).min(p.len());
                pairwise_sum(&p[from..])
            }
        }
    }

    /// One interval; Pareto draws use `floor(u^{1/(1-γ)})` with `u ∈ (0, 1]`.
    pub fn draw<R: RngCore>(&self, rng: &mut R) -> u64 {
        match self {
            Self::Dirac(k) => *k,
            Self::ParetoTail(g) => {
                let u = uniform_open0(rng);
                // saturating float-to-int cast keeps astronomically large draws finite
                (floor(pow(u, 1.0 / (1.0 - g))) as u64).max(1)
            }
            Self::Table(p) => {
                let u = uniform_open0(rng);
                let mut c = 0.0;
                for (i, v) in p.iter().enumerate() {
                    c += v;
                    if u <= c {
                        return i as u64 + 1;
                    }
                }
                self.max_support().unwrap_or(1)
            }
        }
    }

    /// `E Δ`, `+∞` when it diverges.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Dirac(k) => *k as f64,
            Self::ParetoTail(g) if *g > 2.0 => zeta(g - 1.0),
            Self::ParetoTail(_) => f64::INFINITY,
            Self::Table(p) => pairwise_sum(
                &p.iter()
                    .enumerate()
                    .map(|(i, v)| (i + 1) as f64 * v)
                    .collect::<Vec<_>>(),
            ),
        }
    }

    /// `Σ_{k ≤ terms} P(Δ ≥ k)` plus an Euler–Maclaurin estimate of the
    /// remainder; independent of the zeta evaluation used by [`Self::mean`].
    pub fn mean_by_summation(&self, terms: u64) -> f64 {
        match self {
            Self::ParetoTail(g) if *g > 2.0 => {
                let s = g - 1.0;
                let head: Vec<f64> = (1..=terms).map(|k| pow(k as f64, -s)).collect();
                let n = terms as f64;
                let rest =
                    pow(n, 1.0 - s) / (s - 1.0) - 0.5 * pow(n, -s) + s * pow(n, -s - 1.0) / 12.0;
                pairwise_sum(&head) + rest
            }
            _ => self.mean(),
        }
    }

    /// `β = sup{q : E Δ^q < ∞}`; `None` when every moment is finite.
    pub fn tail_index(&self) -> Option<f64> {
        match self {
            Self::ParetoTail(g) => Some(g - 1.0),
            _ => None,
        }
    }

    /// `Ŝ(λ) = E e^{iλΔ}`.
    pub fn char_fn(&self, lambda: f64, tol: f64) -> CharFnValue {
        CharFn::new(self).eval_tol(lambda, tol)
    }

    pub fn char_fn_evaluator(&self) -> CharFn {
        CharFn::new(self)
    }
}

impl fmt::Display for SamplingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dirac(k) => write!(f, "dirac:{k}"),
            Self::ParetoTail(g) => write!(f, "pareto:{g}"),
            Self::Table(p) => {
                write!(f, "table:")?;
                for (i, v) in p.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SamplingLaw {
    type Err = Error;

    /// `dirac:k`, `pareto:γ` or `table:p1,p2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| domain(format!("law '{s}' is not of the form kind:args")))?;
        let bad = |what: &str| domain(format!("cannot parse {what} in law '{s}'"));
        match kind.trim() {
            "dirac" => Self::dirac(arg.trim().parse().map_err(|_| bad("k"))?),
            "pareto" => Self::pareto(arg.trim().parse().map_err(|_| bad("γ"))?),
            "table" => {
                let p = arg
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<core::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("probabilities"))?;
                Self::table(p)
            }
            other => Err(domain(format!("unknown law kind '{other}'"))),
        }
    }
}

/// `Ŝ(λ) = ρ e^{iτ}` with the complement `1 - Ŝ(λ)` kept separately, since
/// it is the small quantity near `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFnValue {
    pub value: Complex64,
    pub rho: f64,
    pub tau: f64,
    pub one_minus: Complex64,
    pub trunc_error: f64,
}

impl CharFnValue {
    fn from_complement(w: Complex64, err: f64) -> Self {
        let value = Complex64::new(1.0 - w.re, -w.im);
        Self {
            value,
            rho: value.norm(),
            tau: value.arg(),
            one_minus: w,
            trunc_error: err,
        }
    }

    /// `1 - ρ²` without cancellation.
    pub fn one_minus_rho_sq(&self) -> f64 {
        2.0 * self.one_minus.re - self.one_minus.norm_sqr()
    }
}

/// Reusable characteristic-function evaluator.
///
/// The Pareto tail uses `Ŝ(λ) = 1 + (1 - e^{-iλ}) Li_{γ-1}(e^{iλ})`, which
/// follows from summing the telescoped pmf by parts.
#[derive(Debug, Clone)]
pub enum CharFn {
    Finite(Vec<(u64, f64)>),
    Pareto(UnitPolylog),
}

impl CharFn {
    pub fn new(law: &SamplingLaw) -> Self {
        match law {
            SamplingLaw::Dirac(k) => Self::Finite(vec![(*k, 1.0)]),
            SamplingLaw::Table(p) => Self::Finite(
                p.iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(i, v)| (i as u64 + 1, *v))
                    .collect(),
            ),
            SamplingLaw::ParetoTail(g) => Self::Pareto(UnitPolylog::new(g - 1.0)),
        }
    }

    pub fn eval(&self, lambda: f64) -> CharFnValue {
        self.eval_tol(lambda, 0.0)
    }

    fn eval_tol(&self, lambda: f64, _tol: f64) -> CharFnValue {
        let lambda = wrap_pi(lambda);
        if lambda == 0.0 {
            return CharFnValue::from_complement(Complex64::new(0.0, 0.0), 0.0);
        }
        match self {
            Self::Finite(atoms) => {
                // 1 - e^{ijλ} = 2 sin²(jλ/2) - i sin(jλ)
                let mut w = Complex64::new(0.0, 0.0);
                for &(j, p) in atoms {
                    let a = wrap_pi(j as f64 * lambda);
                    let s = sin(a / 2.0);
                    w += Complex64::new(2.0 * s * s, -sin(a)) * p;
                }
                CharFnValue::from_complement(w, 1e-16 * atoms.len() as f64)
            }
            Self::Pareto(li) => {
                let (l, err) = li.eval(lambda);
                let half = lambda / 2.0;
                // 1 - e^{-iλ} = 2i sin(λ/2) e^{-iλ/2}
                let factor =
                    Complex64::new(0.0, 2.0 * sin(half)) * Complex64::new(cos(half), -sin(half));
                let w = -(factor * l);
                CharFnValue::from_complement(w, err * factor.norm())
            }
        }
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    if (-PI..=PI).contains(&x) && x != -PI {
        return x;
    }
    let two_pi = 2.0 * PI;
    let mut r = x - two_pi * floor((x + PI) / two_pi);
    if r <= -PI {
        r += two_pi;
    }
    if r > PI {
        r -= two_pi;
    }
    r
}

/// `S^{*h}` on `start..start + probs.len()`, with the mass beyond the table.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    pub start: u64,
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

impl PmfTable {
    /// Probability of `j`, zero outside the table.
    pub fn get(&self, j: u64) -> f64 {
        if j < self.start {
            return 0.0;
        }
        self.probs
            .get((j - self.start) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn end(&self) -> u64 {
        self.start + self.probs.len() as u64
    }
}

/// `pmf(0..=cut)` of the law as a dense vector (entry 0 is zero).
pub(crate) fn dense_pmf(law: &SamplingLaw, cut: usize) -> Vec<f64> {
    let mut a = vec![0.0; cut + 1];
    for (j, slot) in a.iter_mut().enumerate().skip(1) {
        *slot = law.pmf(j as u64).unwrap_or(0.0);
    }
    a
}

/// Truncated powers `S^{*h}` restricted to `0..=cut`. Because every interval
/// is at least one, entries at indices `≤ cut` are exact.
pub struct PowerStepper {
    cut: usize,
    plan: RealFft,
    /// packed spectra of `S^{*2^b}` truncated to `0..=cut`
    pow_spec: Vec<Vec<Complex64>>,
    pow_dense: Vec<Vec<f64>>,
}

impl PowerStepper {
    pub fn new(law: &SamplingLaw, cut: usize) -> Self {
        let base = dense_pmf(law, cut);
        let plan = RealFft::new((2 * (cut + 1)).next_power_of_two().max(4));
        let spec = spectrum(&base, &plan);
        Self {
            cut,
            plan,
            pow_spec: vec![spec],
            pow_dense: vec![base],
        }
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    fn ensure_power(&mut self, b: usize) {
        while self.pow_dense.len() <= b {
            let last = self.pow_dense.last().expect("base power");
            let sq = if self.cut < 64 {
                convolve_truncated(last, last, self.cut + 1)
            } else {
                let s = self.pow_spec.last().expect("base spectrum");
                inverse_truncated(self.plan.square(s), self.cut + 1, &self.plan)
            };
            self.pow_spec.push(spectrum(&sq, &self.plan));
            self.pow_dense.push(sq);
        }
    }

    /// `c * S^{*k}` truncated to `0..=cut`.
    pub fn advance(&mut self, c: &[f64], k: u64) -> Vec<f64> {
        let mut cur = c.to_vec();
        let mut k = k;
        let mut b = 0;
        while k > 0 {
            if k & 1 == 1 {
                self.ensure_power(b);
                cur = if self.cut < 64 {
                    convolve_truncated(&cur, &self.pow_dense[b], self.cut + 1)
                } else {
                    let mut cs = spectrum(&cur, &self.plan);
                    self.plan.multiply(&mut cs, &self.pow_spec[b]);
                    inverse_truncated(cs, self.cut + 1, &self.plan)
                };
            }
            k >>= 1;
            b += 1;
        }
        cur
    }

    /// Dense `S^{*h}` on `0..=cut`.
    pub fn power(&mut self, h: u64) -> Vec<f64> {
        let mut delta = vec![0.0; self.cut + 1];
        delta[0] = 1.0;
        self.advance(&delta, h)
    }
}

fn spectrum(a: &[f64], plan: &RealFft) -> Vec<Complex64> {
    plan.forward(a)
}

fn inverse_truncated(spec: Vec<Complex64>, len: usize, plan: &RealFft) -> Vec<f64> {
    let mut out = plan.inverse(spec, len);
    // FFT round-off can leave tiny negative probabilities
    for v in out.iter_mut() {
        *v = v.max(0.0);
    }
    out
}

/// Wraps a dense truncated power into a table starting at `h`.
pub(crate) fn to_table(dense: &[f64], h: u64) -> PmfTable {
    let start = (h as usize).min(dense.len());
    let probs = dense[start..].to_vec();
    let tail_mass = (1.0 - pairwise_sum(&probs)).max(0.0);
    PmfTable {
        start: h,
        probs,
        tail_mass,
    }
}

/// `S^{*h}` with `tail_mass ≤ cutoff_mass`, by binary powering of FFT
/// convolutions on a truncated support that is doubled until the cutoff is
/// met.
pub fn convolve_power(law: &SamplingLaw, h: u64, cutoff_mass: f64) -> Result<PmfTable> {
    convolve_power_with_budget(law, h, cutoff_mass, DEFAULT_TABLE_BUDGET)
}

pub fn convolve_power_with_budget(
    law: &SamplingLaw,
    h: u64,
    cutoff_mass: f64,
    budget: usize,
) -> Result<PmfTable> {
    law.validate()?;
    if h < 1 {
        return Err(domain("convolution power needs h ≥ 1"));
    }
    if !(cutoff_mass > 0.0 && cutoff_mass <= 1e-8) {
        return Err(domain("cutoff mass must lie in (0, 1e-8]"));
    }
    if let SamplingLaw::Dirac(k) = law {
        return Ok(PmfTable {
            start: k * h,
            probs: vec![1.0],
            tail_mass: 0.0,
        });
    }
    let mut cut = initial_cut(law, h, cutoff_mass)
        .min(budget.saturating_sub(1))
        .max(h as usize);
    loop {
        if cut + 1 > budget {
            return Err(Error::Resource(format!(
                "S^*{h} needs more than {budget} table entries to reach tail mass {cutoff_mass:e}"
            )));
        }
        let dense = PowerStepper::new(law, cut).power(h);
        let table = to_table(&dense, h);
        let exact_support = law.max_support().is_some_and(|m| (cut as u64) >= m * h);
        if exact_support {
            return Ok(PmfTable {
                tail_mass: 0.0,
                ..table
            });
        }
        if table.tail_mass <= cutoff_mass {
            return Ok(table);
        }
        if cut + 1 == budget {
            return Err(Error::Resource(format!(
                "S^*{h} tail mass {:e} above {cutoff_mass:e} at the {budget}-entry budget",
                table.tail_mass
            )));
        }
        cut = (2 * cut + 1).min(budget - 1);
    }
}

/// First guess for the cut: `P(T_h > J) ≈ h P(Δ > J)` for a single large
/// jump, plus room for the bulk at `h E Δ`.
fn initial_cut(law: &SamplingLaw, h: u64, mass: f64) -> usize {
    let hf = h as f64;
    match law {
        SamplingLaw::Dirac(k) => (k * h) as usize,
        SamplingLaw::Table(_) => (law.max_support().unwrap_or(1) * h) as usize,
        SamplingLaw::ParetoTail(g) => {
            let jump = pow(hf / mass, 1.0 / (g - 1.0));
            let bulk = if *g > 2.0 {
                4.0 * hf * law.mean()
            } else {
                4.0 * pow(hf, 1.0 / (g - 1.0))
            };
            jump.max(bulk).min(1e12) as usize
        }
    }
}

/// Sampling times `T_0 = 0 < T_1 < ... < T_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomWalkPath {
    pub times: Vec<u64>,
    pub seed: u64,
}

/// `T_j = T_{j-1} + Δ_j`; deterministic given `seed`. Times saturate at
/// `u64::MAX`, which heavy tails with `γ` near one can reach; use
/// [`walk_capped`] there.
pub fn walk(law: &SamplingLaw, n: usize, seed: u64) -> RandomWalkPath {
    let mut rng = stream(derive_seed(seed, 0, tag::WALK));
    let mut times = Vec::with_capacity(n + 1);
    times.push(0u64);
    let mut t = 0u64;
    for _ in 0..n {
        t = t.saturating_add(law.draw(&mut rng));
        times.push(t);
    }
    RandomWalkPath { times, seed }
}

/// As [`walk`], but gives up once `T_j` exceeds `t_max`.
pub fn walk_capped(law: &SamplingLaw, n: usize, seed: u64, t_max: u64) -> Option<RandomWalkPath> {
    let mut rng = stream(derive_seed(seed, 0, tag::WALK));
    let mut times = Vec::with_capacity(n + 1);
    times.push(0u64);
    let mut t = 0u64;
    for _ in 0..n {
        t = t.saturating_add(law.draw(&mut rng));
        if t > t_max {
            return None;
        }
        times.push(t);
    }
    Some(RandomWalkPath { times, seed })
}

/// Human-readable description of the moment structure.
pub fn describe_moments(law: &SamplingLaw) -> String {
    match law.tail_index() {
        Some(b) => format!(
            "moments of order < {} are finite",
            libm::round(b * 1e12) / 1e12
        ),
        None => String::from("all moments are finite"),
    }
}
