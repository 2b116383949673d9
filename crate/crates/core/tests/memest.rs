use std::f64::consts::PI;

use lmsample_core::covmap::{fit_decay, CovSeq};
use lmsample_core::math::mean_sd;
use lmsample_core::memest::*;
use lmsample_core::procgen::{
    frac_acvf_seq, frac_ma_coeffs, gen_at_indices, gen_trajectory_ma, MacoeffTable,
    DEFAULT_MA_ORDER,
};
use lmsample_core::rng::{derive_seed, NoiseStream};
use lmsample_core::samplaw::{walk, SamplingLaw};
use proptest::prelude::*;

fn white(n: usize, seed: u64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    NoiseStream::new(seed).fill(0, &mut v);
    v
}

fn farima_series(d: f64, n: usize, seed: u64) -> Vec<f64> {
    gen_trajectory_ma(&frac_ma_coeffs(d, DEFAULT_MA_ORDER).unwrap(), n, seed).values
}

/// Covariances of the truncated moving average `Σ_{j ≤ m} ψ_j ε_{t-j}`.
fn truncated_acvf(t: &MacoeffTable) -> Vec<f64> {
    let c = &t.coeffs;
    (0..c.len())
        .map(|h| (0..c.len() - h).map(|j| c[j] * c[j + h]).sum())
        .collect()
}

/// `E (1/n) Σ_t (x_t - x̄)(x_{t+h} - x̄)` for a stationary series with
/// autocovariance `sig` (zero beyond its length).
fn expected_biased_acf(sig: &[f64], n: usize, h: usize) -> f64 {
    let at = |k: usize| sig.get(k).copied().unwrap_or(0.0);
    // cum[m] = Σ_{k ≤ m} σ(k)
    let mut cum = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        acc += at(k);
        cum.push(acc);
    }
    // row[t] = Σ_s σ(t - s) = n E(x_t x̄)
    let row = |t: usize| cum[t] + cum[n - 1 - t] - at(0);
    let nf = n as f64;
    let q: f64 = (0..n).map(row).sum::<f64>() / (nf * nf);
    let cross: f64 = (0..n - h).map(|t| row(t) + row(t + h)).sum::<f64>() / nf;
    ((n - h) as f64 * (at(h) + q) - cross) / nf
}

#[test]
fn white_noise_acf() {
    let n = 100_000;
    let x = white(n, 3);
    let a = emp_acf(&x, 5).unwrap();
    assert!((a.values[1] / a.values[0]).abs() <= 3.0 / (n as f64).sqrt());
    let (m, _) = mean_sd(&x);
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
    assert!((a.values[0] - var).abs() < 1e-12);
}

#[test]
fn farima_lag_one_acf() {
    let d = 0.35;
    let n = 100_000;
    let table = frac_ma_coeffs(d, DEFAULT_MA_ORDER).unwrap();
    let sig = truncated_acvf(&table);
    // with the theoretical ρ(1) = d/(1-d) on the truncated process
    assert!((sig[1] / sig[0] - d / (1.0 - d)).abs() < 0.02);
    let want = expected_biased_acf(&sig, n, 1);
    let reps: Vec<f64> = (0..20u64)
        .map(|s| {
            emp_acf(&gen_trajectory_ma(&table, n, 40 + s).values, 1)
                .unwrap()
                .values[1]
        })
        .collect();
    let (m, sd) = mean_sd(&reps);
    let se = sd / (reps.len() as f64).sqrt();
    assert!((m - want).abs() <= 3.0 * se, "{m} ± {se} vs {want}");
}

#[test]
fn acf_errors() {
    assert!(emp_acf(&[1.5; 100], 2).is_err());
    assert!(emp_acf(&white(10, 1), 10).is_err());
    let a = emp_acf(&white(500, 1), 100).unwrap();
    assert_eq!(a.max_lag(), 100);
}

#[test]
fn empirical_decay_of_long_memory() {
    // the default order m = 5000 steepens the covariance by itself at
    // d = 0.35 (α ≈ 0.366 on [20, 200]); m = 5·10^4 keeps that below 0.04
    let d = 0.35;
    let n = 1_000_000;
    let table = frac_ma_coeffs(d, 50_000).unwrap();
    let x = gen_trajectory_ma(&table, n, 12).values;
    let fit = fit_decay(&emp_acf(&x, 200).unwrap(), 20, 200).unwrap();
    assert!(
        (fit.alpha_hat - (1.0 - 2.0 * d)).abs() < 0.05,
        "{}",
        fit.alpha_hat
    );
    // against the exact expectation of the estimator for this filter
    let c = &table.coeffs;
    let sig: Vec<f64> = (0..=200)
        .map(|h| (0..c.len() - h).map(|j| c[j] * c[j + h]).sum())
        .collect();
    let mut full = frac_acvf_seq(d, table.truncation_m);
    full[..=200].copy_from_slice(&sig);
    let expected: Vec<f64> = (0..=200)
        .map(|h| expected_biased_acf(&full, n, h))
        .collect();
    let oracle = fit_decay(&CovSeq::exact(expected, "expected"), 20, 200).unwrap();
    assert!(
        (fit.alpha_hat - oracle.alpha_hat).abs() < 0.02,
        "{} vs {}",
        fit.alpha_hat,
        oracle.alpha_hat
    );
}

#[test]
fn periodogram_examples() {
    let n = 1 << 14;
    let x = white(n, 9);
    let g = periodogram(&x).unwrap();
    assert_eq!(g.freqs.len(), n / 2);
    assert!((g.freqs[0] - 2.0 * PI / n as f64).abs() < 1e-15);
    let var = emp_acf(&x, 0).unwrap().values[0];
    // the Nyquist ordinate is counted once
    let total = 2.0 * g.values.iter().sum::<f64>() - g.values[n / 2 - 1];
    assert!((total * 2.0 * PI / n as f64 / var - 1.0).abs() < 1e-10);
    let mean = g.values.iter().sum::<f64>() / g.values.len() as f64;
    assert!((mean / (var / (2.0 * PI)) - 1.0).abs() < 0.05);
    let j0 = 101;
    let c: Vec<f64> = (0..1000)
        .map(|t| (2.0 * PI * j0 as f64 * t as f64 / 1000.0).cos())
        .collect();
    let p = periodogram(&c).unwrap();
    let arg = (0..p.values.len())
        .max_by(|&a, &b| p.values[a].total_cmp(&p.values[b]))
        .unwrap();
    assert_eq!(arg + 1, j0);
    assert!(periodogram(&x[..15]).is_err());
}

#[test]
fn gph_examples() {
    let x = white(1 << 14, 21);
    let m = default_gph_bandwidth(x.len());
    assert_eq!(m, 128);
    let e = gph(&x, m).unwrap();
    assert_eq!(
        (e.method, e.bandwidth_or_order, e.n),
        (Method::Gph, 128, 1 << 14)
    );
    assert!(e.d_hat.abs() <= 3.0 * e.stderr);
    assert!(e.ci95.0 < e.d_hat && e.d_hat < e.ci95.1);
    let rev: Vec<f64> = x.iter().rev().copied().collect();
    assert!((gph(&rev, m).unwrap().d_hat - e.d_hat).abs() < 1e-12);
    assert!(gph(&x, 1).is_err());
}

#[test]
fn gph_on_long_memory() {
    let table = frac_ma_coeffs(0.35, DEFAULT_MA_ORDER).unwrap();
    let hats: Vec<f64> = (0..100u64)
        .map(|r| {
            let x = gen_trajectory_ma(&table, 5000, derive_seed(7, r, 0)).values;
            gph(&x, default_gph_bandwidth(5000)).unwrap().d_hat
        })
        .collect();
    let (m, _) = mean_sd(&hats);
    assert!((0.30..=0.40).contains(&m), "{m}");
}

#[test]
fn gph_stderr_formula() {
    let x = white(4096, 2);
    let a = gph(&x, 16).unwrap().stderr;
    let b = gph(&x, 64).unwrap().stderr;
    assert_eq!(a, PI / (24.0f64 * 16.0).sqrt());
    assert!((a / b - 2.0).abs() < 1e-15);
}

#[test]
fn fexp_examples() {
    let x = white(1 << 13, 5);
    let e = fexp(&x, 3).unwrap();
    assert_eq!((e.method, e.bandwidth_or_order), (Method::Fexp, 3));
    assert!(e.d_hat.abs() <= 3.0 * e.stderr && e.stderr > 0.0);
    assert_eq!(default_fexp_order(5000), 8);
    assert!(fexp(&x, 21).is_err());
}

fn sampled_fexp_mean(d: f64, gamma: f64, reps: u64) -> f64 {
    let table = frac_ma_coeffs(d, DEFAULT_MA_ORDER).unwrap();
    let law = SamplingLaw::pareto(gamma).unwrap();
    let n = 5000;
    let hats: Vec<f64> = (0..reps)
        .map(|r| {
            let times = walk(&law, n - 1, derive_seed(99, r, 1)).times;
            let y = gen_at_indices(&table, &times, derive_seed(99, r, 2));
            fexp(&y, default_fexp_order(n)).unwrap().d_hat
        })
        .collect();
    mean_sd(&hats).0
}

#[test]
fn fexp_on_sampled_processes() {
    let m = sampled_fexp_mean(0.1, 2.2, 100);
    assert!((m - 0.1).abs() <= 0.07, "preserved: {m}");
    let m = sampled_fexp_mean(0.35, 1.9, 100);
    assert!((m - 0.30).abs() <= 0.07, "reduced: {m}");
}

#[test]
fn estimators_agree_on_farima() {
    let n = 1 << 14;
    for (i, &d) in [0.1, 0.35].iter().enumerate() {
        let x = farima_series(d, n, 300 + i as u64);
        let a = gph(&x, default_gph_bandwidth(n)).unwrap();
        let b = fexp(&x, default_fexp_order(n)).unwrap();
        let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!(
            (a.d_hat - b.d_hat).abs() <= 2.0 * se,
            "d={d}: {} vs {}",
            a.d_hat,
            b.d_hat
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scale_equivariance(c in 1e-3f64..1e3, seed in any::<u64>()) {
        let x = white(2048, seed);
        let y: Vec<f64> = x.iter().map(|v| c * v).collect();
        for (a, b) in [(gph(&x, 45).unwrap(), gph(&y, 45).unwrap()), (fexp(&x, 4).unwrap(), fexp(&y, 4).unwrap())] {
            prop_assert!((a.d_hat - b.d_hat).abs() < 1e-12);
            prop_assert_eq!(a.stderr, b.stderr);
        }
    }

    #[test]
    fn acf_bounded_by_variance(seed in any::<u64>(), n in 50usize..600) {
        let a = emp_acf(&white(n, seed), 40).unwrap();
        prop_assert!(a.values.iter().all(|v| v.abs() <= a.values[0] * (1.0 + 1e-12)));
    }
}
