use lmsample_core::covmap::*;
use lmsample_core::math::special::zeta;
use lmsample_core::procgen::{frac_acvf_seq, FarimaSpec};
use lmsample_core::samplaw::{SamplingLaw, DEFAULT_TABLE_BUDGET};
use proptest::prelude::*;

fn pareto(g: f64) -> SamplingLaw {
    SamplingLaw::pareto(g).unwrap()
}

fn farima(d: f64) -> FarimaCov {
    FarimaCov::new(&FarimaSpec::fractional(d).unwrap()).unwrap()
}

fn ar1(phi: f64) -> FnAutocov<impl Fn(u64) -> f64 + Sync> {
    let s0 = 1.0 / (1.0 - phi * phi);
    FnAutocov {
        f: move |j: u64| s0 * phi.powi(j as i32),
        envelope: Some(Envelope::Geometric {
            c: s0,
            rate: phi.abs(),
        }),
    }
}

/// `E φ^Δ` by direct summation.
fn pgf(law: &SamplingLaw, phi: f64) -> f64 {
    (1..=200u64)
        .map(|j| law.pmf(j).unwrap() * phi.powi(j as i32))
        .sum()
}

#[test]
fn ar1_closed_form() {
    let phi = 0.6;
    let s0 = 1.0 / (1.0 - phi * phi);
    for law in [SamplingLaw::dirac(3).unwrap(), pareto(2.8)] {
        let m = pgf(&law, phi);
        let lags: Vec<u64> = (0..=10).collect();
        let got =
            sampled_cov_exact_lags(&ar1(phi), &law, &lags, 1e-12, DEFAULT_TABLE_BUDGET).unwrap();
        for h in 0..=10usize {
            let want = s0 * m.powi(h as i32);
            assert!((got.values[h] - want).abs() < 1e-10, "{law} h={h}");
        }
    }
}

#[test]
fn short_memory_stays_short() {
    let laws = [
        SamplingLaw::dirac(2).unwrap(),
        pareto(1.3),
        pareto(1.9),
        pareto(2.8),
        SamplingLaw::table(vec![0.3, 0.3, 0.4]).unwrap(),
    ];
    for phi in [0.6, -0.5, 0.9] {
        let s0 = 1.0 / (1.0 - phi * phi);
        for law in &laws {
            let m = pgf(law, phi);
            let lags: Vec<u64> = (0..=40).collect();
            let got =
                sampled_cov_exact_lags(&ar1(phi), law, &lags, 1e-12, DEFAULT_TABLE_BUDGET).unwrap();
            let total: f64 = got.values.iter().map(|v| v.abs()).sum();
            assert!(total <= s0 / (1.0 - m.abs()) + 1e-9, "φ={phi} {law}");
        }
    }
}

#[test]
fn lag_one_against_brute_force_sum() {
    // Σ_{j ≤ 10^7} σ_X(j) S(j); the rest is at most σ_X(10^7) P(Δ > 10^7)
    let d = 0.35;
    let law = pareto(2.8);
    let n = 10_000_000usize;
    let sig = frac_acvf_seq(d, n + 1);
    let terms: Vec<f64> = (1..=n)
        .map(|j| sig[j] * law.pmf(j as u64).unwrap())
        .collect();
    let head = lmsample_core::math::pairwise_sum(&terms);
    let rest = sig[n + 1] * law.tail(n as u64 + 1);
    let tol = 1e-12;
    let got = sampled_cov_exact(&farima(d), &law, 1, tol).unwrap();
    assert!((got - head).abs() <= tol + rest, "{got} vs {head} + {rest}");
}

#[test]
fn dirac_is_pointwise() {
    let cov = farima(0.3);
    for k in [1u64, 2, 7] {
        for h in [0u64, 1, 5, 40] {
            let v = sampled_cov_exact(&cov, &SamplingLaw::dirac(k).unwrap(), h, 1e-9).unwrap();
            assert_eq!(v, cov.at(k * h));
        }
    }
}

#[test]
fn mc_agrees_with_exact() {
    let cov = farima(0.35);
    let law = pareto(2.8);
    let exact = sampled_cov_exact(&cov, &law, 5, 1e-8).unwrap();
    let (mean, se) = sampled_cov_mc(&cov, &law, 5, 100_000, 77).unwrap();
    assert!(se > 0.0);
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} ± {se} vs {exact}");
}

#[test]
fn mc_dirac_and_errors() {
    let cov = farima(0.2);
    let (m, se) = sampled_cov_mc(&cov, &SamplingLaw::dirac(3).unwrap(), 4, 100, 5).unwrap();
    assert_eq!((m, se), (cov.at(12), 0.0));
    assert!(sampled_cov_mc(&cov, &pareto(2.8), 4, 99, 5).is_err());
}

#[test]
fn mc_standard_error_scales_with_reps() {
    let cov = farima(0.35);
    let law = pareto(2.8);
    let mut ratios = Vec::new();
    for t in 0..50u64 {
        let (_, a) = sampled_cov_mc(&cov, &law, 3, 1000, 1000 + t).unwrap();
        let (_, b) = sampled_cov_mc(&cov, &law, 3, 2000, 5000 + t).unwrap();
        ratios.push(b / a);
    }
    let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let want = std::f64::consts::FRAC_1_SQRT_2;
    assert!((avg / want - 1.0).abs() < 0.2, "{avg}");
}

#[test]
fn missing_envelope_rejected_for_unbounded_law() {
    let cov = FnAutocov {
        f: |j: u64| 1.0 / (1.0 + j as f64),
        envelope: None,
    };
    assert!(sampled_cov_exact(&cov, &pareto(2.8), 2, 1e-6).is_err());
    let table = SamplingLaw::table(vec![0.5, 0.5]).unwrap();
    let v = sampled_cov_exact(&cov, &table, 2, 1e-6).unwrap();
    assert!((v - (0.25 / 3.0 + 0.5 / 4.0 + 0.25 / 5.0)).abs() < 1e-15);
}

#[test]
fn halving_tolerance_moves_less_than_old_tolerance() {
    let cov = farima(0.35);
    for law in [pareto(2.8), pareto(1.9)] {
        for h in [1u64, 5, 20] {
            let mut tol = 1e-3;
            let mut prev = sampled_cov_exact(&cov, &law, h, tol).unwrap();
            for _ in 0..4 {
                let next = sampled_cov_exact(&cov, &law, h, tol / 2.0).unwrap();
                assert!((next - prev).abs() <= tol, "{law} h={h} tol={tol}");
                prev = next;
                tol /= 2.0;
            }
        }
    }
}

#[test]
fn heavy_tail_upper_bound_rate() {
    // σ_Y(h) h^{α/β} stays bounded for α = 0.3, β = 0.9
    let lags: Vec<u64> = [10u64, 20, 50, 100, 200, 500, 1000].to_vec();
    let got = sampled_cov_exact_lags(
        &farima(0.35),
        &pareto(1.9),
        &lags,
        1e-4,
        DEFAULT_TABLE_BUDGET,
    )
    .unwrap();
    let scaled: Vec<f64> = lags
        .iter()
        .zip(&got.values)
        .map(|(&h, v)| v * (h as f64).powf(0.3 / 0.9))
        .collect();
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    assert!(lo > 0.0 && hi / lo < 1.5, "{scaled:?}");
}

#[test]
fn prediction_examples() {
    let p = predict_memory(0.35, &pareto(2.8)).unwrap();
    assert_eq!((p.regime, p.d_out), (Regime::Preserved, Some(0.35)));
    let p = predict_memory(0.35, &pareto(1.9)).unwrap();
    assert_eq!(p.regime, Regime::Reduced);
    assert!((p.d_out.unwrap() - 0.30).abs() < 1e-12);
    let p = predict_memory(0.1, &pareto(1.7)).unwrap();
    assert_eq!((p.regime, p.d_out), (Regime::Short, None));
    let p = predict_memory(0.1, &SamplingLaw::table(vec![0.1, 0.9]).unwrap()).unwrap();
    assert_eq!(p.regime, Regime::Preserved);
    assert!(predict_memory(0.0, &pareto(2.8)).is_err());
    assert!(predict_memory(0.5, &pareto(2.8)).is_err());
}

#[test]
fn prediction_boundaries_are_continuous() {
    for &d in &[0.05, 0.2, 0.35, 0.45] {
        let below = predict_memory(d, &pareto(2.0 - 1e-9)).unwrap();
        assert!((below.d_value() - d).abs() < 1e-8);
        assert_eq!(predict_memory(d, &pareto(2.0 + 1e-9)).unwrap().d_value(), d);
        let edge = 2.0 * (1.0 - d);
        let above = predict_memory(d, &pareto(edge + 1e-9)).unwrap();
        assert_eq!(above.regime, Regime::Reduced);
        assert!(above.d_value() < 1e-8);
        assert_eq!(
            predict_memory(d, &pareto(edge - 1e-6)).unwrap().regime,
            Regime::Short
        );
    }
}

#[test]
fn fit_decay_examples() {
    let pure = CovSeq::exact(
        (0..=200).map(|h| (h.max(1) as f64).powf(-0.3)).collect(),
        "power",
    );
    let f = fit_decay(&pure, 1, 200).unwrap();
    assert!((f.alpha_hat - 0.3).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
    let fc = CovSeq::exact(frac_acvf_seq(0.35, 1000), "farima");
    assert!((fit_decay(&fc, 100, 1000).unwrap().alpha_hat - 0.30).abs() < 0.01);
}

#[test]
fn fit_decay_drops_non_positive_values() {
    let mut v: Vec<f64> = (0..=100).map(|h| (h.max(1) as f64).powf(-0.5)).collect();
    v[50] = -0.1;
    v[60] = 0.0;
    let f = fit_decay(&CovSeq::exact(v.clone(), "noisy"), 10, 100).unwrap();
    assert_eq!(f.used_lags, 89);
    assert!((f.alpha_hat - 0.5).abs() < 1e-12);
    for x in &mut v[15..] {
        *x = -1.0;
    }
    assert!(fit_decay(&CovSeq::exact(v, "noisy"), 10, 100).is_err());
}

#[test]
fn fini_ratio_dirac_and_pareto() {
    let alpha = 0.3;
    let k = 3u64;
    let y = CovSeq::exact(
        (0..=50u64)
            .map(|h| ((k * h).max(1) as f64).powf(-alpha))
            .collect(),
        "dirac",
    );
    let r = fini_ratio(
        1.0,
        alpha,
        &SamplingLaw::dirac(k).unwrap(),
        &y,
        &[5, 20, 50],
    )
    .unwrap();
    for v in r {
        assert!((v - (k as f64).powf(-alpha)).abs() < 1e-14);
    }
    assert!(fini_ratio(1.0, alpha, &pareto(1.9), &y, &[5]).is_err());
}

#[test]
fn fini_ratio_settles() {
    let d = 0.35;
    let law = pareto(2.8);
    let lags: Vec<u64> = (0..=1000).collect();
    let got = sampled_cov_exact_lags(&farima(d), &law, &lags, 1e-6, DEFAULT_TABLE_BUDGET).unwrap();
    let y = CovSeq::exact(got.values, "sampled");
    // σ_X(h) ~ c h^{2d-1} with c = Γ(1-2d)/(Γ(d)Γ(1-d))
    let g = lmsample_core::math::special::gamma;
    let c = g(1.0 - 2.0 * d) / (g(d) * g(1.0 - d));
    let alpha = 1.0 - 2.0 * d;
    let hs: Vec<usize> = (100..=1000).collect();
    let r = fini_ratio(c, alpha, &law, &y, &hs).unwrap();
    let target = zeta(1.8).powf(-alpha);
    assert!(
        (r[400] / target - 1.0).abs() < 0.1,
        "{} vs {target}",
        r[400]
    );
    let osc = |lo: usize, hi: usize| {
        let w = &r[lo - 100..=hi - 100];
        w.iter().cloned().fold(f64::MIN, f64::max) - w.iter().cloned().fold(f64::MAX, f64::min)
    };
    assert!(osc(100, 250) > osc(250, 500) && osc(250, 500) > osc(500, 1000));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dirac_consistency(d in 0.01f64..0.49, k in 1u64..20, h in 0u64..200) {
        let cov = farima(d);
        let v = sampled_cov_exact(&cov, &SamplingLaw::dirac(k).unwrap(), h, 1e-9).unwrap();
        prop_assert_eq!(v, cov.at(k * h));
    }

    #[test]
    fn farima_envelope_dominates(d in 0.01f64..0.49, ar in -0.8f64..0.8, ma in -0.8f64..0.8) {
        let spec = FarimaSpec::new(vec![ar], vec![ma], d, 1.0).unwrap();
        let cov = FarimaCov::new(&spec).unwrap();
        let env = cov.envelope().unwrap();
        for j in (1..20_000u64).step_by(7) {
            prop_assert!(cov.at(j).abs() <= env.bound(j as f64), "j={}", j);
        }
    }

    #[test]
    fn exact_values_bounded_by_variance(d in 0.05f64..0.45, g in 2.2f64..3.5) {
        let lags: Vec<u64> = (0..=30).collect();
        let cov = farima(d);
        // the certified tail bound is about 30 c J^{2d-γ}; near d = 0.45,
        // γ = 2.2 it needs J ≈ 3e7, past the budget
        let Envelope::Power { c, alpha } = cov.envelope().unwrap() else {
            panic!("power envelope expected")
        };
        let need = (30.0 * c / 1e-8).powf(1.0 / (g - 1.0 + alpha));
        let got = match sampled_cov_exact_lags(&cov, &pareto(g), &lags, 1e-8, DEFAULT_TABLE_BUDGET) {
            Ok(v) => v,
            Err(e) => {
                prop_assert!(matches!(e, lmsample_core::Error::Resource(_)), "{:?}", e);
                prop_assert!(need > DEFAULT_TABLE_BUDGET as f64 / 4.0, "need {}", need);
                return Ok(());
            }
        };
        prop_assert!(got.values[0] > 0.0);
        for h in 1..=30 {
            prop_assert!(got.values[h] > 0.0 && got.values[h] <= got.values[h - 1]);
            prop_assert!(got.error_bounds[h] <= 1e-8);
        }
    }
}
