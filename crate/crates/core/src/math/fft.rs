//! Radix-2 FFT, Bluestein's algorithm for arbitrary lengths, and truncated
//! linear convolution of real sequences.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, sin};

use super::Complex64;

fn twiddles(n: usize, inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n / 2)
        .map(|k| {
            let a = sign * 2.0 * PI * k as f64 / n as f64;
            Complex64::new(cos(a), sin(a))
        })
        .collect()
}

/// Precomputed twiddles for repeated power-of-two transforms of one size.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    fwd: Vec<Complex64>,
    inv: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT plans need a power-of-two length");
        Self {
            n,
            fwd: twiddles(n, false),
            inv: twiddles(n, true),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized in-place transform.
    pub fn run(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.n);
        if inverse {
            bit_reverse(buf);
            dit(buf, &self.inv, 1);
        } else {
            dif(buf, &self.fwd, 1);
            bit_reverse(buf);
        }
    }

    /// Forward transform leaving the output in bit-reversed order.
    pub fn forward_scrambled(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        dif(buf, &self.fwd, 1);
    }

    /// Inverse transform of bit-reversed input, output in natural order.
    pub fn inverse_scrambled(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        dit(buf, &self.inv, 1);
    }
}

/// Transforms of real sequences of power-of-two length `n` through a complex
/// transform of length `n/2`.
///
/// Spectra are kept in a packed, bit-reversed layout: slot `rev(k)` holds
/// `X_k` for `0 < k < n/2`, and slot 0 holds `X_0 + i X_{n/2}` (both real).
/// Only pointwise products and [`RealFft::inverse`] should consume them.
#[derive(Debug, Clone)]
pub struct RealFft {
    n: usize,
    half: FftPlan,
    /// `e^{-2πik/n}`, `k < n/2`
    w: Vec<Complex64>,
}

impl RealFft {
    pub fn new(n: usize) -> Self {
        assert!(
            n.is_power_of_two() && n >= 4,
            "real FFT length must be a power of two ≥ 4"
        );
        Self {
            n,
            half: FftPlan::new(n / 2),
            w: (0..n / 2)
                .map(|k| {
                    let a = -2.0 * PI * k as f64 / n as f64;
                    Complex64::new(cos(a), sin(a))
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn slot(&self, k: usize) -> usize {
        let m = self.n / 2;
        let bits = m.trailing_zeros();
        if bits == 0 {
            0
        } else {
            k.reverse_bits() >> (usize::BITS - bits)
        }
    }

    /// Packed spectrum of `x` zero-padded to length `n`.
    pub fn forward(&self, x: &[f64]) -> Vec<Complex64> {
        assert!(x.len() <= self.n);
        let m = self.n / 2;
        let mut z = vec![Complex64::new(0.0, 0.0); m];
        for (t, zt) in z.iter_mut().enumerate() {
            let re = x.get(2 * t).copied().unwrap_or(0.0);
            let im = x.get(2 * t + 1).copied().unwrap_or(0.0);
            *zt = Complex64::new(re, im);
        }
        self.half.forward_scrambled(&mut z);
        let z0 = z[0];
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        out[0] = Complex64::new(z0.re + z0.im, z0.re - z0.im);
        for k in 1..=m / 2 {
            let (pk, pm) = (self.slot(k), self.slot(m - k));
            let (zk, zm) = (z[pk], z[pm]);
            let e = (zk + zm.conj()) * 0.5;
            let o = (zk - zm.conj()) * Complex64::new(0.0, -0.5);
            out[pk] = e + self.w[k] * o;
            // X_{m-k} = conj(E_k) + W^{m-k} conj(O_k), W^{m-k} = -conj(W^k)
            out[pm] = e.conj() - self.w[k].conj() * o.conj();
        }
        out
    }

    /// Pointwise product of two packed spectra.
    pub fn multiply(&self, a: &mut [Complex64], b: &[Complex64]) {
        a[0] = Complex64::new(a[0].re * b[0].re, a[0].im * b[0].im);
        for (x, y) in a[1..].iter_mut().zip(&b[1..]) {
            *x *= *y;
        }
    }

    /// Packed square of a packed spectrum.
    pub fn square(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut out = a.to_vec();
        self.multiply(&mut out, a);
        out
    }

    /// Inverse of [`RealFft::forward`], normalized, first `len` samples.
    pub fn inverse(&self, mut y: Vec<Complex64>, len: usize) -> Vec<f64> {
        let m = self.n / 2;
        let y0 = y[0];
        let mut z = vec![Complex64::new(0.0, 0.0); m];
        // E_0 = (Y_0 + Y_m)/2, O_0 = (Y_0 - Y_m)/2
        z[0] = Complex64::new(0.5 * (y0.re + y0.im), 0.5 * (y0.re - y0.im));
        for k in 1..=m / 2 {
            let (pk, pm) = (self.slot(k), self.slot(m - k));
            let (yk, ym) = (y[pk], y[pm]);
            let e = (yk + ym.conj()) * 0.5;
            let o = (yk - ym.conj()) * self.w[k].conj() * 0.5;
            z[pk] = e + Complex64::new(0.0, 1.0) * o;
            // E_{m-k} = conj(E_k), O_{m-k} = conj(O_k)
            z[pm] = e.conj() + Complex64::new(0.0, 1.0) * o.conj();
        }
        y.clear();
        self.half.inverse_scrambled(&mut z);
        let scale = 1.0 / m as f64;
        (0..len.min(self.n))
            .map(|i| {
                let c = z[i / 2];
                if i % 2 == 0 {
                    c.re * scale
                } else {
                    c.im * scale
                }
            })
            .collect()
    }
}

/// In-place radix-2 transform, `buf.len()` a power of two. Unnormalized in
/// both directions.
pub fn fft_pow2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft_pow2 needs a power-of-two length");
    FftPlan::new(n).run(buf, inverse);
}

fn bit_reverse(buf: &mut [Complex64]) {
    let n = buf.len();
    if n <= 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
}

/// Decimation in frequency, natural order in, bit-reversed out. `tw` holds
/// the roots of unity of the full length; `stride` selects those of
/// `buf.len()`.
fn dif(buf: &mut [Complex64], tw: &[Complex64], stride: usize) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let half = n / 2;
    let (lo, hi) = buf.split_at_mut(half);
    for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
        let (u, v) = (*a, *b);
        *a = u + v;
        *b = (u - v) * tw[k * stride];
    }
    dif(lo, tw, 2 * stride);
    dif(hi, tw, 2 * stride);
}

/// Decimation in time, bit-reversed in, natural order out.
fn dit(buf: &mut [Complex64], tw: &[Complex64], stride: usize) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let half = n / 2;
    let (lo, hi) = buf.split_at_mut(half);
    dit(lo, tw, 2 * stride);
    dit(hi, tw, 2 * stride);
    for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
        let u = *a;
        let v = *b * tw[k * stride];
        *a = u + v;
        *b = u - v;
    }
}

/// Forward DFT `X_k = Σ x_t e^{-2πitk/n}` for any `n`.
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    if n.is_power_of_two() || n == 0 {
        let mut out = x.to_vec();
        fft_pow2(&mut out, false);
        return out;
    }
    // Bluestein: tk = (t^2 + k^2 - (k-t)^2)/2
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let kk = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            let a = -PI * kk / n as f64;
            Complex64::new(cos(a), sin(a))
        })
        .collect();
    let m = (2 * n - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for t in 0..n {
        a[t] = x[t] * chirp[t];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai *= *bi;
    }
    fft_pow2(&mut a, true);
    let scale = 1.0 / m as f64;
    (0..n).map(|k| a[k] * scale * chirp[k]).collect()
}

/// First `out_len` terms of the linear convolution `a * b`.
pub fn convolve_truncated(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let la = a.len().min(out_len);
    let lb = b.len().min(out_len);
    if la == 0 || lb == 0 || out_len == 0 {
        return vec![0.0; out_len];
    }
    if la.min(lb) <= 32 {
        let mut out = vec![0.0; out_len];
        for i in 0..la {
            for j in 0..lb.min(out_len - i) {
                out[i + j] += a[i] * b[j];
            }
        }
        return out;
    }
    let full = la + lb - 1;
    let n = full.next_power_of_two();
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for (i, zi) in z.iter_mut().enumerate().take(la) {
        zi.re = a[i];
    }
    for (i, zi) in z.iter_mut().enumerate().take(lb) {
        zi.im = b[i];
    }
    fft_pow2(&mut z, false);
    // split the packed transform into A and B, multiply
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let zk = z[k];
        let zc = z[(n - k) % n].conj();
        let ak = (zk + zc) * 0.5;
        let bk = (zk - zc) * Complex64::new(0.0, -0.5);
        p[k] = ak * bk;
    }
    fft_pow2(&mut p, true);
    let scale = 1.0 / n as f64;
    (0..out_len)
        .map(|i| if i < full { p[i].re * scale } else { 0.0 })
        .collect()
}
