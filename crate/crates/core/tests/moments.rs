use levyfield::moments::{
    estimate_fractional_moment, fourier_moment, sample_many, sample_norm_powers, verify_growth, verify_lemma23,
    Estimator,
};
use levyfield::stats::{linear_fit, mean, std_dev};
use levyfield::CharacteristicExponent;
use proptest::prelude::*;

// E|X_1|^p for Ψ = |ξ|^α, n = 1
const STABLE_15_HALF: f64 = 1.080429797374515;
const BROWNIAN_HALF: f64 = 0.9777410674469237;
const STABLE_15_THREE_QUARTERS: f64 = 1.2774802679648458;

#[test]
fn exact_moments_by_monte_carlo() {
    let cases = [
        (CharacteristicExponent::brownian(1).unwrap(), 0.5, BROWNIAN_HALF),
        (CharacteristicExponent::stable(1, 1.5).unwrap(), 0.5, STABLE_15_HALF),
        (CharacteristicExponent::cauchy(1).unwrap(), 0.4, 1.0 / (0.2 * std::f64::consts::PI).cos()),
    ];
    for (e, k, exact) in cases {
        let m = estimate_fractional_moment(&e, 1.0, k, 200_000, 11).unwrap();
        assert!((m.mc_value - exact).abs() < 4.0 * m.mc_stderr, "{}: {} vs {exact}", e.name(), m.mc_value);
        assert!(m.mc_value <= m.fitted_c * m.integral_bound * (1.0 + 1e-12));
    }
}

#[test]
fn heavy_moments_switch_estimator() {
    let e = CharacteristicExponent::stable(1, 1.5).unwrap();
    let m = estimate_fractional_moment(&e, 1.0, 0.75, 200_000, 5).unwrap();
    assert_eq!(m.estimator, Estimator::MedianOfMeans);
    assert!((m.mc_value - STABLE_15_THREE_QUARTERS).abs() < 4.0 * m.mc_stderr);
}

#[test]
fn fourier_identity_matches_the_closed_form() {
    let f = fourier_moment(&CharacteristicExponent::stable(1, 1.5).unwrap(), 1.0, 0.5).unwrap();
    assert!((f.value - STABLE_15_HALF).abs() < 1e-6 + f.error);
    let b = fourier_moment(&CharacteristicExponent::brownian(1).unwrap(), 1.0, 0.5).unwrap();
    assert!((b.value - BROWNIAN_HALF).abs() < 1e-6 + b.error);
}

#[test]
fn two_dimensional_gaussian_norm() {
    // ‖X_1‖² for Ψ = ‖ξ‖² in 2D is exponential with mean 4
    let e = CharacteristicExponent::brownian(2).unwrap();
    let r = sample_norm_powers(&e, 1.0, 2.0, 100_000, 3).unwrap();
    let se = std_dev(&r) / (r.len() as f64).sqrt();
    assert!((mean(&r) - 4.0).abs() < 4.0 * se);
}

#[test]
fn stable_growth_slope() {
    let e = CharacteristicExponent::stable(1, 1.5).unwrap();
    let t = levyfield::stats::logspace(0.01, 1.0, 6);
    let g = verify_growth(&e, 0.75, &t, 0.49 * 0.75, 100_000, 17).unwrap();
    assert!((g.slope - 0.5).abs() < 0.03, "{}", g.slope);
    assert!(g.holds && g.fitted_c.is_finite());
}

#[test]
fn lemma23_across_catalog() {
    for e in [
        CharacteristicExponent::cauchy(1).unwrap(),
        CharacteristicExponent::tempered_stable(1, 1.5, 1.0).unwrap(),
        CharacteristicExponent::brownian(2).unwrap(),
    ] {
        let r = verify_lemma23(&e, 0.5, &[0.25, 0.5, 1.0], 50_000, 2).unwrap();
        assert!(r.holds, "{}", e.name());
        assert!(r.fitted_c >= 1.0 && r.ratio_max.is_finite());
    }
}

#[test]
fn sampling_is_reproducible() {
    let e = CharacteristicExponent::tempered_stable(2, 1.2, 0.5).unwrap();
    let a = sample_many(&e, 0.5, 10_000, 99).unwrap();
    let b = sample_many(&e, 0.5, 10_000, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 20_000);
    assert_ne!(a, sample_many(&e, 0.5, 10_000, 100).unwrap());
}

#[test]
fn too_few_replicas_rejected() {
    let e = CharacteristicExponent::cauchy(1).unwrap();
    assert!(estimate_fractional_moment(&e, 1.0, 0.5, 10, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // Same seed at two times: exact self-similarity gives the t^{κ/α} law
    #[test]
    fn stable_self_similarity(alpha in 0.6f64..2.0, t in 0.05f64..2.0) {
        let e = CharacteristicExponent::stable(1, alpha).unwrap();
        let k = 0.2 * alpha;
        let a = sample_norm_powers(&e, t, k, 4096, 1).unwrap();
        let b = sample_norm_powers(&e, 1.0, k, 4096, 1).unwrap();
        let fit = linear_fit(&[t.ln(), 0.0], &[mean(&a).ln(), mean(&b).ln()]);
        if (t - 1.0).abs() > 1e-3 {
            prop_assert!((fit.unwrap().slope - k / alpha).abs() < 1e-9);
        }
    }
}
