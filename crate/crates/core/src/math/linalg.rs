//! Small dense least squares and polynomial roots.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use super::Complex64;
use crate::error::{numeric, Result};

/// Least-squares solution of a full-column-rank system.
#[derive(Debug, Clone, PartialEq)]
pub struct LsFit {
    pub coef: Vec<f64>,
    pub rss: f64,
    /// `(X'X)^{-1}`, row-major `p × p`.
    pub xtx_inv: Vec<f64>,
}

/// Solves `min |X b - y|` by Householder QR. `x` is row-major `n × p`.
pub fn least_squares(x: &[f64], n: usize, p: usize, y: &[f64]) -> Result<LsFit> {
    assert_eq!(x.len(), n * p);
    assert_eq!(y.len(), n);
    if n < p || p == 0 {
        return Err(numeric("fewer observations than regressors", f64::INFINITY));
    }
    // column-major working copy
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..n).map(|i| x[i * p + j]).collect())
        .collect();
    let mut b = y.to_vec();
    let col_scale: Vec<f64> = a
        .iter()
        .map(|c| sqrt(c.iter().map(|v| v * v).sum::<f64>()))
        .collect();
    let mut r = vec![0.0; p * p];
    for k in 0..p {
        let norm = sqrt(a[k][k..].iter().map(|v| v * v).sum::<f64>());
        if norm <= 1e-12 * col_scale[k].max(f64::MIN_POSITIVE) {
            return Err(numeric("design matrix is rank deficient", norm));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        let apply = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vnorm2;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        };
        for col in a.iter_mut().skip(k) {
            apply(&mut col[k..]);
        }
        apply(&mut b[k..]);
        for j in k..p {
            r[k * p + j] = a[j][k];
        }
    }
    // back substitution R b = Q'y
    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in i + 1..p {
            s -= r[i * p + j] * coef[j];
        }
        coef[i] = s / r[i * p + i];
    }
    let rss: f64 = b[p..].iter().map(|v| v * v).sum();
    // R^{-1} (upper triangular), then (X'X)^{-1} = R^{-1} R^{-T}
    let mut rinv = vec![0.0; p * p];
    for c in 0..p {
        for i in (0..=c).rev() {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for j in i + 1..=c {
                s -= r[i * p + j] * rinv[j * p + c];
            }
            rinv[i * p + c] = s / r[i * p + i];
        }
    }
    let mut xtx_inv = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for k in i.max(j)..p {
                s += rinv[i * p + k] * rinv[j * p + k];
            }
            xtx_inv[i * p + j] = s;
        }
    }
    Ok(LsFit { coef, rss, xtx_inv })
}

/// Ordinary regression of `y` on `x` with intercept: `(slope, intercept, r2)`.
pub fn simple_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, intercept, r2)
}

/// Roots of `z^n + c[0] z^{n-1} + ... + c[n-1]` by the Aberth–Ehrlich
/// iteration.
pub fn monic_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len();
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &ci in c {
            dp = dp * z + p;
            p = p * z + ci;
        }
        (p, dp)
    };
    let bound = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let a = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, a)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_recovers_exact_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let (s, i, r2) = simple_regression(&x, &y);
        assert!((s + 0.5).abs() < 1e-13 && (i - 3.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qr_matches_normal_equations() {
        let n = 30;
        let p = 3;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let t = i as f64 / 7.0;
            x.extend_from_slice(&[1.0, t, libm::cos(t)]);
            y.push(0.2 + 1.5 * t - 0.7 * libm::cos(t) + 0.01 * libm::sin(13.0 * t));
        }
        let fit = least_squares(&x, n, p, &y).unwrap();
        // normal equations check: X'(y - Xb) = 0
        for j in 0..p {
            let mut g = 0.0;
            for i in 0..n {
                let fitted: f64 = (0..p).map(|k| x[i * p + k] * fit.coef[k]).sum();
                g += x[i * p + j] * (y[i] - fitted);
            }
            assert!(g.abs() < 1e-11, "{g}");
        }
        // (X'X)^{-1} X'X = I
        for i in 0..p {
            for j in 0..p {
                let mut s = 0.0;
                for k in 0..p {
                    let xtx: f64 = (0..n).map(|r| x[r * p + k] * x[r * p + j]).sum();
                    s += fit.xtx_inv[i * p + k] * xtx;
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rank_deficiency_detected() {
        let x = [1.0, 2.0, 2.0, 4.0, 3.0, 6.0];
        assert!(least_squares(&x, 3, 2, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (z - 0.5)(z + 0.25)(z^2 + 0.81)
        let c = [-0.25, 0.685, -0.2025, -0.10125];
        let mut mods: Vec<f64> = monic_roots(&c).iter().map(|z| z.norm()).collect();
        mods.sort_by(f64::total_cmp);
        let want = [0.25, 0.5, 0.9, 0.9];
        for (m, w) in mods.iter().zip(want) {
            assert!((m - w).abs() < 1e-12, "{mods:?}");
        }
    }
}
