mod common;

use common::*;
use mtdespeckle::prelude::*;
use mtdespeckle::speckle::{fisher_tippett_pdf, gamma_pdf, log_speckle_bias};
use proptest::prelude::*;

fn looks(l: f64) -> LooksCount {
    LooksCount::new(l).unwrap()
}

#[test]
fn gamma_density_integrates_to_one() {
    for l in [1.0, 2.0, 3.0, 4.7, 10.0] {
        let total = simpson(|u| gamma_pdf(u, looks(l)).unwrap(), 0.0, 50.0, 400_000);
        assert!((total - 1.0).abs() < 1e-6, "L={l}: {total}");
    }
}

#[test]
fn log_density_integrates_to_one() {
    for l in [1.0, 2.0, 3.0, 4.7, 10.0] {
        let total = simpson(|z| fisher_tippett_pdf(z, looks(l)), -30.0, 10.0, 400_000);
        assert!((total - 1.0).abs() < 1e-6, "L={l}: {total}");
    }
}

#[test]
fn log_density_has_log_bias_as_mean() {
    for l in [1.0, 4.0, 4.7] {
        let m = simpson(|z| z * fisher_tippett_pdf(z, looks(l)), -30.0, 10.0, 400_000);
        assert!((m - (digamma(l) - l.ln())).abs() < 1e-8, "L={l}: {m}");
    }
}

#[test]
fn log_bias_matches_series_oracle() {
    // psi(1) = -gamma, psi(4) = 1 + 1/2 + 1/3 - gamma.
    assert!((log_speckle_bias(looks(1.0)) + EULER_GAMMA).abs() < 1e-13);
    let psi4 = 1.0 + 0.5 + 1.0 / 3.0 - EULER_GAMMA;
    assert!((log_speckle_bias(looks(4.0)) - (psi4 - 4f64.ln())).abs() < 1e-13);
    for l in [1.5, 2.0, 3.3, 7.0, 25.0, 100.0] {
        let want = digamma(l) - l.ln();
        assert!((log_speckle_bias(looks(l)) - want).abs() < 1e-12, "L={l}");
    }
}

#[test]
fn uncorrelated_field_matches_single_look_distribution() {
    let a = sample_correlated_speckle(200, 200, 0, RngSeed(101)).unwrap();
    let b = sample_speckle(200, 200, LooksCount::SINGLE, RngSeed(202)).unwrap();
    let d = ks_statistic(a.data(), b.data());
    assert!(d < ks_critical_001(a.len(), b.len()), "KS D = {d}");
    let same = sample_correlated_speckle(30, 20, 0, RngSeed(5)).unwrap();
    assert_eq!(same, sample_speckle(30, 20, LooksCount::SINGLE, RngSeed(5)).unwrap());
}

#[test]
fn correlated_field_is_not_single_look_at_lag_one() {
    let a = sample_correlated_speckle(256, 256, 2, RngSeed(3)).unwrap();
    let b = sample_speckle(256, 256, LooksCount::SINGLE, RngSeed(3)).unwrap();
    let la = mtdespeckle::metrics::lag1_autocorrelation(&a);
    let lb = mtdespeckle::metrics::lag1_autocorrelation(&b);
    assert!(la > 0.2 && lb.abs() < 0.02, "{la} {lb}");
}

#[test]
fn enl_recovers_looks_on_homogeneous_regions() {
    for l in [1.0, 4.0, 16.0] {
        for seed in 0..5 {
            let u = sample_speckle(256, 256, looks(l), RngSeed(seed)).unwrap();
            let enl = estimate_enl(&u).unwrap().get();
            assert!((0.9 * l..=1.1 * l).contains(&enl), "L={l} seed={seed}: {enl}");
        }
    }
}

#[test]
fn non_integer_looks_use_the_gamma_sampler() {
    let u = sample_speckle(500, 500, looks(2.5), RngSeed(9)).unwrap();
    let m = mean(u.data());
    let v = variance(u.data());
    assert!((m - 1.0).abs() < 5.0 / (u.len() as f64 * 2.5).sqrt());
    assert!((v - 0.4).abs() < 0.01, "{v}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn densities_agree_under_change_of_variables(z in -20.0f64..3.0, l in 1.0f64..32.0) {
        let l = looks(l);
        let ft = fisher_tippett_pdf(z, l);
        let g = gamma_pdf(z.exp(), l).unwrap() * z.exp();
        prop_assert!(ulps(ft, g) <= 4, "{ft} vs {g}");
    }

    #[test]
    fn speckle_mean_within_five_standard_errors(l in 1.0f64..20.0, seed in any::<u64>()) {
        let u = sample_speckle(64, 64, looks(l), RngSeed(seed)).unwrap();
        let se = 1.0 / (u.len() as f64 * l).sqrt();
        prop_assert!((u.mean() - 1.0).abs() < 5.0 * se);
    }

    #[test]
    fn log_round_trip(values in prop::collection::vec(0.1f64..10.0, 1..200)) {
        let n = values.len();
        let w = IntensityImage::new(n, 1, values).unwrap();
        let back = from_log(&to_log(&w, DEFAULT_EPS).unwrap());
        for (a, b) in back.data().iter().zip(w.data()) {
            prop_assert!(ulps(*a, *b) <= 4, "{a} vs {b}");
        }
    }

    #[test]
    fn speckle_is_seed_deterministic(seed in any::<u64>(), l in 1u32..6) {
        let a = sample_speckle(16, 8, looks(l as f64), RngSeed(seed)).unwrap();
        let b = sample_speckle(16, 8, looks(l as f64), RngSeed(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}
