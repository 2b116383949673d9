//! Numerical building blocks: special functions, quadrature, FFT, and small
//! dense linear algebra.

pub mod fft;
pub mod linalg;
pub mod quad;
pub mod special;

pub use num_complex::Complex64;

/// Pairwise (tree) summation. Deterministic and accurate to `O(log n)` ulps.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `a[i] * b[i]`.
pub fn pairwise_dot(a: &[f64], b: &[f64]) -> f64 {
    const LEAF: usize = 64;
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= LEAF {
        let mut s = 0.0;
        for i in 0..a.len() {
            s += a[i] * b[i];
        }
        return s;
    }
    let mid = a.len() / 2;
    pairwise_dot(&a[..mid], &b[..mid]) + pairwise_dot(&a[mid..], &b[mid..])
}

/// Sample mean and unbiased standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut ss = 0.0;
    for &x in xs {
        ss += (x - mean) * (x - mean);
    }
    (mean, libm::sqrt(ss / (n - 1) as f64))
}
