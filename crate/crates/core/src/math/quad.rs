//! Adaptive Gauss–Kronrod quadrature with algebraic endpoint singularities.
//!
//! Integrands are evaluated at an [`At`] point, which carries the anchor it
//! was reached from together with the (possibly tiny) offset. Densities with
//! a singularity at the anchor use the offset directly, so an abscissa
//! `1e-200` away from a singular frequency is not rounded onto it.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use libm::{cos, pow};

use crate::error::{numeric, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

/// Quadrature accuracy settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Uniform panels each piece starts with; raise for oscillatory integrands.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 20_000,
            initial_panels: 1,
        }
    }
}

impl QuadConfig {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// An abscissa `anchor + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct At {
    pub anchor: f64,
    pub offset: f64,
}

impl At {
    pub fn plain(x: f64) -> Self {
        Self {
            anchor: x,
            offset: 0.0,
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.anchor + self.offset
    }

    /// Signed distance to `target`, exact when the anchor sits on it.
    #[inline]
    pub fn dist(&self, target: f64) -> f64 {
        if (self.anchor - target).abs() <= ANCHOR_SNAP {
            self.offset
        } else {
            (self.anchor - target) + self.offset
        }
    }
}

/// Anchors closer than this to a singular point are treated as sitting on it.
pub const ANCHOR_SNAP: f64 = 1e-11;

/// A breakpoint of the integration range. The integrand may behave like
/// `|x - p|^{-exponent}` there, with `0 <= exponent < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    pub exponent: f64,
}

impl Breakpoint {
    pub fn regular(x: f64) -> Self {
        Self { x, exponent: 0.0 }
    }

    pub fn singular(x: f64, exponent: f64) -> Self {
        Self { x, exponent }
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Plain { a: f64, w: f64 },
    Left { a: f64, w: f64, q: f64 },
    Right { b: f64, w: f64, q: f64 },
}

impl Piece {
    #[inline]
    fn map(&self, t: f64) -> (At, f64) {
        match *self {
            Piece::Plain { a, w } => (
                At {
                    anchor: a,
                    offset: w * t,
                },
                w,
            ),
            Piece::Left { a, w, q } => (
                At {
                    anchor: a,
                    offset: w * pow(t, q),
                },
                w * q * pow(t, q - 1.0),
            ),
            Piece::Right { b, w, q } => (
                At {
                    anchor: b,
                    offset: -w * pow(t, q),
                },
                w * q * pow(t, q - 1.0),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Ranked {
    error: f64,
    idx: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

fn kronrod<F: FnMut(At) -> f64>(f: &mut F, piece: &Piece, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut eval = |t: f64| -> f64 {
        let (at, jac) = piece.map(t);
        if jac == 0.0 || (at.offset == 0.0 && !matches!(piece, Piece::Plain { .. })) {
            return 0.0;
        }
        f(at) * jac
    };
    let fc = eval(c);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut fv = [0.0f64; 21];
    fv[10] = fc;
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = eval(c - dx);
        let f2 = eval(c + dx);
        fv[j] = f1;
        fv[20 - j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }
    let value = resk * h;
    resasc *= h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        let r = pow(200.0 * err / resasc, 1.5);
        err = resasc * if r < 1.0 { r } else { 1.0 };
    }
    if !value.is_finite() {
        return (value, f64::INFINITY);
    }
    (value, err)
}

/// `∫_a^b f(x) dx` for a regular integrand.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_singular(
        |at: At| f(at.x()),
        &[Breakpoint::regular(a), Breakpoint::regular(b)],
        cfg,
    )
}

/// Integrates across consecutive breakpoints, removing the algebraic
/// singularities declared on them by the substitution `x = p ± w t^q`,
/// `q = 1/(1 - exponent)`, which makes the transformed integrand bounded.
pub fn integrate_singular<F: FnMut(At) -> f64>(
    mut f: F,
    points: &[Breakpoint],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let mut pieces = Vec::new();
    for pair in points.windows(2) {
        let (l, r) = (pair[0], pair[1]);
        let w = r.x - l.x;
        if w <= 0.0 {
            continue;
        }
        let ql = 1.0 / (1.0 - l.exponent);
        let qr = 1.0 / (1.0 - r.exponent);
        match (l.exponent > 0.0, r.exponent > 0.0) {
            (false, false) => pieces.push(Piece::Plain { a: l.x, w }),
            (true, false) => pieces.push(Piece::Left { a: l.x, w, q: ql }),
            (false, true) => pieces.push(Piece::Right { b: r.x, w, q: qr }),
            (true, true) => {
                pieces.push(Piece::Left {
                    a: l.x,
                    w: w / 2.0,
                    q: ql,
                });
                pieces.push(Piece::Right {
                    b: r.x,
                    w: w / 2.0,
                    q: qr,
                });
            }
        }
    }
    let panels_per = cfg.initial_panels.max(1);
    let mut panels: Vec<Panel> = Vec::with_capacity(pieces.len() * panels_per * 4);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (pi, piece) in pieces.iter().enumerate() {
        for k in 0..panels_per {
            let lo = k as f64 / panels_per as f64;
            let hi = (k + 1) as f64 / panels_per as f64;
            let (value, error) = kronrod(&mut f, piece, lo, hi);
            total += value;
            total_err += error;
            heap.push(Ranked {
                error,
                idx: panels.len(),
            });
            panels.push(Panel {
                piece: pi,
                lo,
                hi,
                value,
                error,
            });
        }
    }
    let mut frozen_err = 0.0;
    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if !total.is_finite() {
            return Err(numeric("integrand is not finite", f64::INFINITY));
        }
        if panels.len() >= cfg.max_intervals {
            return Err(numeric(
                "adaptive quadrature hit its interval budget",
                total_err,
            ));
        }
        let Some(top) = heap.pop() else { break };
        let p = panels[top.idx];
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo || mid >= p.hi || (p.hi - p.lo) < 1e-14 * p.hi.abs().max(1e-300) {
            // cannot split further; keep its error in the final estimate
            frozen_err += p.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let piece = pieces[p.piece];
        let (v1, e1) = kronrod(&mut f, &piece, p.lo, mid);
        let (v2, e2) = kronrod(&mut f, &piece, mid, p.hi);
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
        panels[top.idx] = Panel {
            hi: mid,
            value: v1,
            error: e1,
            ..p
        };
        heap.push(Ranked {
            error: e1,
            idx: top.idx,
        });
        heap.push(Ranked {
            error: e2,
            idx: panels.len(),
        });
        panels.push(Panel {
            piece: p.piece,
            lo: mid,
            hi: p.hi,
            value: v2,
            error: e2,
        });
        if heap.is_empty() {
            break;
        }
    }
    // resum to remove drift from the running updates
    let mut values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let value = super::pairwise_sum(&values);
    let error: f64 = panels.iter().map(|p| p.error).sum::<f64>().max(frozen_err);
    Ok(QuadResult {
        value,
        error,
        intervals: panels.len(),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = alloc::vec![0.0; n];
    let mut ws = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}
