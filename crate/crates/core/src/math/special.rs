//! Gamma ratios, the Riemann zeta function on the real line, and the
//! polylogarithm on the unit circle.

use core::f64::consts::PI;

use libm::{cos, exp, expm1, floor, lgamma, log, log1p, pow, sin, tgamma};
use num_complex::Complex64;

/// `B_2, B_4, ..., B_20`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

pub fn ln_gamma(x: f64) -> f64 {
    lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    tgamma(x)
}

/// `Γ(x + a) / Γ(x + b)` for `x + a > 0` and `x + b > 0`, with the shifts
/// `a` and `b` applied exactly (not through the rounded sums `x + a`).
///
/// Large arguments go through the difference of Stirling series so that the
/// ratio keeps full relative precision where `lgamma` differences would not.
pub fn gamma_ratio(x: f64, a: f64, b: f64) -> f64 {
    let u = x + a;
    let v = x + b;
    if u.min(v) < 20.0 || x < 20.0 {
        return exp(lgamma(u) - lgamma(v));
    }
    // (u-1/2)ln u - (v-1/2)ln v - (a - b), with ln(x + c) = ln x + log1p(c/x)
    let (la, lb) = (log1p(a / x), log1p(b / x));
    let mut s = (a - b) * log(x) + (u - 0.5) * la - (v - 0.5) * lb - (a - b);
    for (k, b2k) in BERNOULLI_EVEN.iter().take(6).enumerate() {
        let k = (k + 1) as f64;
        let p = 1.0 - 2.0 * k;
        s += b2k / (2.0 * k * (2.0 * k - 1.0)) * (pow(u, p) - pow(v, p));
    }
    exp(s)
}

/// `1 - (1 + 1/j)^e` without cancellation, times `j^e`; i.e. `j^e - (j+1)^e`.
pub fn power_difference(j: f64, e: f64) -> f64 {
    -pow(j, e) * expm1(e * log1p(1.0 / j))
}

/// Riemann zeta function for real `s != 1`.
pub fn zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s < 0.0 {
        if s == floor(s) && (s as i64) % 2 == 0 {
            return 0.0;
        }
        let t = 1.0 - s;
        return pow(2.0, s) * pow(PI, s - 1.0) * sin(PI * s / 2.0) * tgamma(t) * zeta_em(t);
    }
    zeta_em(s)
}

/// Euler–Maclaurin evaluation, accurate for `s >= 0`, `s != 1`.
fn zeta_em(s: f64) -> f64 {
    const N: usize = 20;
    let n = N as f64;
    let mut head = 0.0;
    for k in (1..N).rev() {
        head += pow(k as f64, -s);
    }
    let mut tail = pow(n, 1.0 - s) / (s - 1.0) + 0.5 * pow(n, -s);
    // rising factorial s (s+1) ... (s+2k-2) and (2k)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = pow(n, -s - 1.0);
    for (k, b2k) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b2k / fact * rising * npow;
        tail += term;
        let kk = (k + 1) as f64;
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        npow /= n * n;
    }
    head + tail
}

/// Harmonic number `H_n`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Series representation of `Li_s(e^{iλ})` for `0 < |λ| ≤ π` and `s > 0`.
///
/// Uses `Li_s(e^μ) = Γ(1-s)(-μ)^{s-1} + Σ_k ζ(s-k) μ^k / k!` (non-integer
/// `s`), with the logarithmic form at integer `s`. Arguments within `1e-3`
/// of an integer are interpolated in `s` through the integer value and two
/// neighbours, which avoids the cancellation between the two poles.
#[derive(Debug, Clone)]
pub struct UnitPolylog {
    nodes: alloc::vec::Vec<PolylogNode>,
    /// Lagrange interpolation abscissae and target (empty when exact).
    interp: Option<([f64; 3], f64)>,
}

#[derive(Debug, Clone)]
struct PolylogNode {
    /// `ζ(s-k)/k!` for `k = 0..K`; the integer pole term is stored as zero.
    coeffs: alloc::vec::Vec<f64>,
    kind: NodeKind,
}

#[derive(Debug, Clone, Copy)]
enum NodeKind {
    /// Non-integer order: `Γ(1-s)` and `s`.
    General { gamma_1ms: f64, s: f64 },
    /// Integer order `n`: `H_{n-1}` and `(n-1)!`.
    Integer {
        n: usize,
        harmonic: f64,
        factorial: f64,
    },
}

const POLYLOG_TERMS: usize = 90;
const NEAR_INTEGER: f64 = 1e-3;
const INTERP_STEP: f64 = 2e-3;

impl UnitPolylog {
    pub fn new(s: f64) -> Self {
        assert!(s > 0.0, "polylog order must be positive");
        let n = libm::round(s);
        if (s - n).abs() < 1e-14 {
            return Self {
                nodes: alloc::vec![PolylogNode::integer(n as usize)],
                interp: None,
            };
        }
        if (s - n).abs() < NEAR_INTEGER && n >= 1.0 {
            let xs = [n - INTERP_STEP, n, n + INTERP_STEP];
            let nodes = alloc::vec![
                PolylogNode::general(xs[0]),
                PolylogNode::integer(n as usize),
                PolylogNode::general(xs[2]),
            ];
            return Self {
                nodes,
                interp: Some((xs, s)),
            };
        }
        Self {
            nodes: alloc::vec![PolylogNode::general(s)],
            interp: None,
        }
    }

    /// `Li_s(e^{iλ})` and an estimate of its absolute error.
    pub fn eval(&self, lambda: f64) -> (Complex64, f64) {
        match self.interp {
            None => self.nodes[0].eval(lambda),
            Some((xs, s)) => {
                let mut v = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                let mut vals = [Complex64::new(0.0, 0.0); 3];
                for i in 0..3 {
                    let (vi, ei) = self.nodes[i].eval(lambda);
                    vals[i] = vi;
                    let mut w = 1.0;
                    for j in 0..3 {
                        if j != i {
                            w *= (s - xs[j]) / (xs[i] - xs[j]);
                        }
                    }
                    v += vi * w;
                    err += ei * w.abs();
                }
                // third-difference size bounds the interpolation error
                let d3 = (vals[2] - vals[1] * 2.0 + vals[0]).norm();
                (v, err + d3 * NEAR_INTEGER / INTERP_STEP + 1e-12 * v.norm())
            }
        }
    }
}

impl PolylogNode {
    fn general(s: f64) -> Self {
        let mut coeffs = alloc::vec::Vec::with_capacity(POLYLOG_TERMS);
        let mut fact = 1.0;
        for k in 0..POLYLOG_TERMS {
            if k > 0 {
                fact *= k as f64;
            }
            coeffs.push(zeta(s - k as f64) / fact);
        }
        Self {
            coeffs,
            kind: NodeKind::General {
                gamma_1ms: tgamma(1.0 - s),
                s,
            },
        }
    }

    fn integer(n: usize) -> Self {
        let mut coeffs = alloc::vec::Vec::with_capacity(POLYLOG_TERMS);
        let mut fact = 1.0;
        let mut nfact = 1.0;
        for k in 0..POLYLOG_TERMS {
            if k > 0 {
                fact *= k as f64;
            }
            if k + 1 == n {
                nfact = fact;
                coeffs.push(0.0);
            } else {
                coeffs.push(zeta(n as f64 - k as f64) / fact);
            }
        }
        Self {
            coeffs,
            kind: NodeKind::Integer {
                n,
                harmonic: harmonic(n - 1),
                factorial: nfact,
            },
        }
    }

    fn eval(&self, lambda: f64) -> (Complex64, f64) {
        let mu = Complex64::new(0.0, lambda);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        let mut last = 0.0;
        let mut prev = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let t = p * *c;
            sum += t;
            // every other ζ(-2m) vanishes, so look at two consecutive terms
            let cur = t.norm();
            last = cur.max(prev);
            if k > 8 && last < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
            prev = cur;
            p *= mu;
        }
        let sgn = if lambda >= 0.0 { 1.0 } else { -1.0 };
        let abs = lambda.abs();
        let lead = match self.kind {
            NodeKind::General { gamma_1ms, s } => {
                // (-iλ)^{s-1} on the principal branch
                let m = pow(abs, s - 1.0);
                let arg = -sgn * PI / 2.0 * (s - 1.0);
                Complex64::new(m * cos(arg), m * sin(arg)) * gamma_1ms
            }
            NodeKind::Integer {
                n,
                harmonic,
                factorial,
            } => {
                let ln_neg_mu = Complex64::new(log(abs), -sgn * PI / 2.0);
                mu.powu((n - 1) as u32) / factorial * (Complex64::new(harmonic, 0.0) - ln_neg_mu)
            }
        };
        let v = lead + sum;
        (v, 4.0 * last + 1e-15 * (lead.norm() + sum.norm()))
    }
}
