use std::f64::consts::PI;

use lmsample_core::covmap::{sampled_cov_exact_lags, FarimaCov};
use lmsample_core::math::quad::{integrate, integrate_singular, Breakpoint, QuadConfig};
use lmsample_core::procgen::{farima_autocov, FarimaSpec, GegenbauerSpec};
use lmsample_core::samplaw::{SamplingLaw, DEFAULT_TABLE_BUDGET};
use lmsample_core::specmap::*;
use proptest::prelude::*;

fn pareto(g: f64) -> SamplingLaw {
    SamplingLaw::pareto(g).unwrap()
}

const PROBE: [f64; 5] = [1e-4, 3e-5, 1e-5, 3e-6, 1e-6];

#[test]
fn farima_density_examples() {
    let w = FarimaSpec::new(vec![], vec![], 0.0, 3.0).unwrap();
    assert!((farima_sd(&w, 1.1).unwrap() - 3.0 / (2.0 * PI)).abs() < 1e-15);
    let s = FarimaSpec::fractional(0.35).unwrap();
    let l: f64 = 1e-6;
    assert!((farima_sd(&s, l).unwrap() * l.powf(0.7) * 2.0 * PI - 1.0).abs() < 0.01);
    assert!(farima_sd(&s, 0.0).is_err());
    assert_eq!(farima_sd(&s, 0.4).unwrap(), farima_sd(&s, -0.4).unwrap());
}

#[test]
fn farima_density_integrates_to_variance() {
    let quad = QuadConfig::with_abs_tol(1e-12);
    for spec in [
        FarimaSpec::fractional(0.35).unwrap(),
        FarimaSpec::new(vec![-0.5], vec![0.4], 0.2, 1.3).unwrap(),
    ] {
        let r = integrate_singular(
            |at| spec.eval_at(at),
            &[
                Breakpoint::singular(0.0, 2.0 * spec.d),
                Breakpoint::regular(PI),
            ],
            &quad,
        )
        .unwrap();
        let var = farima_autocov(&spec, 0).unwrap().values[0];
        assert!(
            (2.0 * r.value - var).abs() < 1e-6,
            "{} vs {var}",
            2.0 * r.value
        );
    }
}

#[test]
fn gegenbauer_density_examples() {
    let t = 2.0 * PI / 3.0;
    let g = GegenbauerSpec::new(vec![(t, 0.3)], None).unwrap();
    for &e in &[1e-2, 1e-4, 1e-6, -1e-6] {
        let v = gegenbauer_sd(&g, t + e).unwrap() * e.abs().powf(0.6);
        assert!(v > 0.0 && v < 1.0, "δ={e}: {v}");
    }
    assert!(gegenbauer_sd(&g, t).is_err());
    let z = GegenbauerSpec::new(vec![(0.0, 0.2)], None).unwrap();
    let f = FarimaSpec::fractional(0.2).unwrap();
    assert!((gegenbauer_sd(&z, 0.3).unwrap() / farima_sd(&f, 0.3).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn poisson_kernel_integrates_to_one() {
    let quad = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_intervals: 50_000,
        initial_panels: 8,
    };
    for s in [0.0, 0.5, 0.9, 0.999] {
        let half = integrate(|t| poisson_kernel(s, t).unwrap(), 0.0, PI, &quad).unwrap();
        assert!(
            (2.0 * half.value - 1.0).abs() < 1e-10,
            "s={s}: {}",
            2.0 * half.value
        );
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if f(m1) >= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn poisson_kernel_supremum_in_s() {
    for t in [0.3f64, 0.7, 1.2] {
        let k = |s: f64| 2.0 * PI * poisson_kernel(s, t).unwrap();
        let s_star = golden_max(k, 0.0, 1.0 - 1e-12);
        let s0 = (1.0 - t.sin()) / t.cos();
        assert!((s_star - s0).abs() < 1e-6, "t={t}");
        assert!((k(s_star) - 1.0 / t.sin()).abs() < 1e-8, "t={t}");
        assert!((k(s0) - 1.0 / t.sin()).abs() < 1e-12);
    }
}

#[test]
fn poisson_kernel_bounds_and_monotonicity() {
    for i in 0..50 {
        let s = i as f64 / 50.0;
        for j in 0..=60 {
            let t = -PI + 2.0 * PI * j as f64 / 60.0;
            let v = 2.0 * PI * poisson_kernel(s, t).unwrap();
            assert!(v >= 0.0 && v <= (1.0 + s) / (1.0 - s) * (1.0 + 1e-15));
        }
        if s == 0.0 {
            continue;
        }
        for a in 1..=20 {
            for b in (a + 1)..=20 {
                let (delta, t) = (PI / 2.0 * a as f64 / 20.0, PI / 2.0 * b as f64 / 20.0);
                assert!(poisson_kernel(s, t).unwrap() < poisson_kernel(s, delta).unwrap());
                assert!(poisson_kernel(s, -t).unwrap() < poisson_kernel(s, delta).unwrap());
            }
        }
    }
}

#[test]
fn unit_density_gives_unit_g() {
    let law = pareto(2.8);
    let quad = default_kernel_quad();
    for r in [0.0, 0.5, 0.9, 0.99] {
        for theta in [0.1, 1.0, 2.0, 3.0] {
            let g = g_r_theta(&WhiteDensity(1.0), &law, r, theta, &quad).unwrap();
            assert!((g.value - 1.0).abs() < 1e-6, "r={r} θ={theta}: {}", g.value);
        }
    }
}

#[test]
fn g_at_zero_radius_is_the_mean_density() {
    let spec = FarimaSpec::fractional(0.3).unwrap();
    let var = farima_autocov(&spec, 0).unwrap().values[0];
    let quad = default_kernel_quad();
    for theta in [0.2, 1.5, 2.9] {
        let g = g_r_theta(&spec, &pareto(1.9), 0.0, theta, &quad).unwrap();
        assert!((g.value - var / (2.0 * PI)).abs() < 1e-8, "θ={theta}");
    }
}

#[test]
fn g_is_nonnegative() {
    let spec = GegenbauerSpec::new(vec![(1.0, 0.3)], None).unwrap();
    let quad = default_kernel_quad();
    for law in [
        pareto(1.5),
        pareto(2.8),
        SamplingLaw::table(vec![0.5, 0.5]).unwrap(),
    ] {
        for r in [0.0, 0.7, 0.99] {
            for theta in [0.05, 1.0, 3.1] {
                let g = g_r_theta(&spec, &law, r, theta, &quad).unwrap();
                assert!(g.value >= 0.0 && g.smoothed >= 0.0 && g.quad_error >= 0.0);
            }
        }
    }
}

#[test]
fn g_rejects_bad_input() {
    let quad = default_kernel_quad();
    let one = WhiteDensity(1.0);
    assert!(g_r_theta(&one, &SamplingLaw::dirac(3).unwrap(), 0.5, 1.0, &quad).is_err());
    assert!(g_r_theta(&one, &pareto(2.8), 1.0, 1.0, &quad).is_err());
    assert!(g_r_theta(&one, &pareto(2.8), 0.5, PI, &quad).is_err());
}

#[test]
fn white_noise_resampled_is_white() {
    let quad = default_kernel_quad();
    let c = 0.7 / (2.0 * PI);
    for law in [pareto(2.8), pareto(1.5)] {
        for theta in [0.3, 1.5, 2.8] {
            let lim =
                sampled_sd_limit(&WhiteDensity(c), &law, theta, &default_r_seq(), &quad).unwrap();
            assert!(
                (lim.value / c - 1.0).abs() < 1e-6,
                "θ={theta}: {}",
                lim.value
            );
        }
    }
}

#[test]
fn sampled_spectrum_reproduces_exact_covariances() {
    let spec = FarimaSpec::fractional(0.2).unwrap();
    let hs: Vec<u64> = (0..=5).collect();
    let got =
        sampled_sd_fourier(&spec, &pareto(2.8), &hs, 0.4, 8, 20, &default_kernel_quad()).unwrap();
    let cov = FarimaCov::new(&spec).unwrap();
    let want = sampled_cov_exact_lags(&cov, &pareto(2.8), &hs, 1e-10, DEFAULT_TABLE_BUDGET)
        .unwrap()
        .values;
    assert_eq!(want[0], farima_autocov(&spec, 0).unwrap().values[0]);
    for h in 0..=5 {
        assert!(
            (got[h] / want[h] - 1.0).abs() < 1e-3,
            "h={h}: {} vs {}",
            got[h],
            want[h]
        );
    }
}

#[test]
fn sampled_limit_rejects_bad_input() {
    let quad = default_kernel_quad();
    let one = WhiteDensity(1.0);
    let law = pareto(2.8);
    assert!(sampled_sd_limit(&one, &law, 0.0, &default_r_seq(), &quad).is_err());
    assert!(sampled_sd_limit(&one, &law, PI, &default_r_seq(), &quad).is_err());
    assert!(sampled_sd_limit(&one, &law, 1.0, &[0.5, 0.6, 0.7], &quad).is_err());
    assert!(sampled_sd_limit(&one, &law, 1.0, &[0.5, 0.7, 0.6, 0.8], &quad).is_err());
    assert!(sampled_sd_limit(
        &one,
        &SamplingLaw::dirac(2).unwrap(),
        1.0,
        &default_r_seq(),
        &quad
    )
    .is_err());
}

#[test]
fn alias_identity() {
    let spec = FarimaSpec::fractional(0.3).unwrap();
    let f = |l: f64| farima_sd(&spec, l).unwrap();
    for l in [-2.0, 0.1, 3.0] {
        assert_eq!(alias_sd(f, 1, l).unwrap(), f(l));
    }
    assert!(alias_sd(f, 0, 0.5).is_err());
}

#[test]
fn alias_preserves_mass() {
    let quad = QuadConfig::with_abs_tol(1e-11);
    let models: Vec<DynDensity> = vec![
        Box::new(FarimaSpec::fractional(0.35).unwrap()),
        Box::new(GegenbauerSpec::new(vec![(2.0 * PI / 3.0, 0.3)], None).unwrap()),
        Box::new(GegenbauerSpec::new(vec![(0.5, 0.2), (2.5, 0.25)], None).unwrap()),
    ];
    for f in &models {
        let total = |dens: &dyn SpectralDensity| {
            let mut pts = vec![Breakpoint::regular(0.0), Breakpoint::regular(PI)];
            for (x, d) in dens.singularities() {
                pts.retain(|p| (p.x - x).abs() > 1e-12);
                pts.push(Breakpoint::singular(x, 2.0 * d));
            }
            pts.sort_by(|a, b| a.x.total_cmp(&b.x));
            2.0 * integrate_singular(|at| dens.eval_at(at), &pts, &quad)
                .unwrap()
                .value
        };
        let base = total(f.as_ref());
        for k in 2..=5u64 {
            let y = AliasedDensity {
                inner: f.as_ref(),
                k,
            };
            let m = total(&y);
            assert!((m / base - 1.0).abs() < 1e-8, "k={k}: {m} vs {base}");
        }
    }
}

#[test]
fn aliasing_example_one() {
    let d = 0.3;
    let spec = FarimaSpec::fractional(d).unwrap();
    let set = SingularitySet::new(spec.singularities()).unwrap();
    assert_eq!(fold_singularities(&set, 3).entries, vec![(0.0, d)]);
    let fy = |l: f64| alias_sd(|x| farima_sd(&spec, x).unwrap_or(f64::INFINITY), 3, l).unwrap();
    assert!((local_exponent(fy, 0.0, &PROBE).unwrap() - d).abs() < 0.03);
    assert!(
        (local_exponent(|l| farima_sd(&spec, l).unwrap(), 0.0, &PROBE).unwrap() - d).abs() < 0.01
    );
}

#[test]
fn aliasing_example_two() {
    let d = 0.3;
    let t = 2.0 * PI / 3.0;
    let spec = GegenbauerSpec::new(vec![(t, d)], None).unwrap();
    let set = SingularitySet::new(spec.singularities()).unwrap();
    assert_eq!(fold_singularities(&set, 3).entries, vec![(0.0, d)]);
    let f = |x: f64| gegenbauer_sd(&spec, x).unwrap_or(f64::INFINITY);
    let fy = |l: f64| alias_sd(f, 3, l).unwrap();
    assert!((local_exponent(fy, 0.0, &PROBE).unwrap() - d).abs() < 0.03);
    for l in [t, -t] {
        let v = alias_sd(f, 3, l).unwrap();
        assert!(v.is_finite());
        for e in [1e-3, 1e-6, 1e-9] {
            assert!((alias_sd(f, 3, l + e).unwrap() / v - 1.0).abs() < 1e-2);
        }
    }
}

#[test]
fn aliasing_example_three() {
    let (d1, d2) = (0.3, 0.2);
    let spec = GegenbauerSpec::new(vec![(PI / 4.0, d1), (3.0 * PI / 4.0, d2)], None).unwrap();
    let set = SingularitySet::new(spec.singularities()).unwrap();
    let out = fold_singularities(&set, 3);
    assert_eq!(out.len(), 2);
    assert!((out.entries[0].0 - PI / 4.0).abs() < 1e-12 && out.entries[0].1 == d2);
    assert!((out.entries[1].0 - 3.0 * PI / 4.0).abs() < 1e-12 && out.entries[1].1 == d1);
    let f = |x: f64| gegenbauer_sd(&spec, x).unwrap_or(f64::INFINITY);
    let fy = |l: f64| alias_sd(f, 3, l).unwrap();
    assert!((local_exponent(fy, PI / 4.0, &PROBE).unwrap() - d2).abs() < 0.03);
    assert!((local_exponent(fy, 3.0 * PI / 4.0, &PROBE).unwrap() - d1).abs() < 0.03);
}

#[test]
fn local_exponent_examples() {
    let d = local_exponent(|l: f64| l.abs().powf(-0.7), 0.0, &[1e-2, 1e-3, 1e-4]).unwrap();
    assert!((d - 0.35).abs() < 1e-12);
    assert!(local_exponent(|_| f64::NAN, 0.0, &[1e-2, 1e-3]).is_err());
}

#[test]
fn singularity_set_validation() {
    assert!(SingularitySet::new(vec![(4.0, 0.2)]).is_err());
    assert!(SingularitySet::new(vec![(1.0, 0.5)]).is_err());
    assert!(SingularitySet::new(vec![(1.0, 0.2), (1.0 + 1e-10, 0.3)]).is_err());
    let s = SingularitySet::new(vec![(2.0, 0.2), (1.0, 0.3)]).unwrap();
    assert_eq!(s.entries, vec![(1.0, 0.3), (2.0, 0.2)]);
    assert_eq!(s.exponent_at(2.0), Some(0.2));
}

/// `k(a ± b)/2π` is an integer for some pair.
fn some_pair_merges(freqs: &[f64], k: u64) -> bool {
    let near_int = |x: f64| (x - x.round()).abs() < 1e-7;
    let kf = k as f64;
    for i in 0..freqs.len() {
        for j in 0..i {
            let (a, b) = (freqs[i], freqs[j]);
            if near_int(kf * (a - b) / (2.0 * PI)) || near_int(kf * (a + b) / (2.0 * PI)) {
                return true;
            }
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn folding_bounds(
        num in prop::collection::btree_set(0u32..=24, 1..6),
        ds in prop::collection::vec(0.01f64..0.49, 6),
        jitter in prop::collection::vec(any::<bool>(), 6),
    ) {
        // mixes rational multiples of π, which collide, with generic frequencies
        let freqs: Vec<f64> = num
            .iter()
            .zip(&jitter)
            .map(|(&a, &j)| PI * a as f64 / 24.0 + if j && a > 0 && a < 24 { 1e-3 * a as f64 } else { 0.0 })
            .collect();
        let set = SingularitySet::new(freqs.iter().zip(&ds).map(|(&f, &d)| (f, d)).collect()).unwrap();
        for k in 1..=12u64 {
            let out = fold_singularities(&set, k);
            prop_assert!(!out.is_empty() && out.len() <= set.len());
            prop_assert_eq!(out.len() < set.len(), some_pair_merges(&freqs, k), "k={}", k);
            prop_assert!(out.entries.iter().all(|&(f, _)| (0.0..=PI).contains(&f)));
            let max_in = set.entries.iter().map(|e| e.1).fold(0.0, f64::max);
            let max_out = out.entries.iter().map(|e| e.1).fold(0.0, f64::max);
            prop_assert_eq!(max_in, max_out);
        }
    }

    #[test]
    fn densities_are_even(d in 0.01f64..0.49, theta in 0.1f64..3.0, l in 0.01f64..3.1) {
        prop_assume!((l - theta).abs() > 1e-3);
        let g = GegenbauerSpec::new(vec![(theta, d)], None).unwrap();
        prop_assert_eq!(gegenbauer_sd(&g, l).unwrap(), gegenbauer_sd(&g, -l).unwrap());
        let f = FarimaSpec::new(vec![0.3], vec![-0.2], d, 1.0).unwrap();
        prop_assert_eq!(farima_sd(&f, l).unwrap(), farima_sd(&f, -l).unwrap());
    }
}
