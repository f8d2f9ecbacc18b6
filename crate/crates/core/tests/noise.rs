use std::f64::consts::PI;

use levyfield::noise::*;
use levyfield::{CharacteristicExponent, Error};
use proptest::prelude::*;

fn sweep_exponents() -> Vec<CharacteristicExponent> {
    vec![
        CharacteristicExponent::brownian(1).unwrap(),
        CharacteristicExponent::cauchy(1).unwrap(),
        CharacteristicExponent::stable(1, 1.5).unwrap(),
        CharacteristicExponent::tempered_stable(1, 1.5, 1.0).unwrap(),
        CharacteristicExponent::tempered_stable(1, 1.2, 2.0).unwrap(),
    ]
}

fn sweep_noises() -> Vec<SpectralNoiseModel> {
    vec![
        SpectralNoiseModel::white(1).unwrap(),
        SpectralNoiseModel::riesz(1, 0.5).unwrap(),
        SpectralNoiseModel::gaussian(1, 1.0).unwrap(),
        SpectralNoiseModel::algebraic(1, 1.0, 1.5).unwrap(),
    ]
}

#[test]
fn dalang_examples() {
    let b1 = CharacteristicExponent::brownian(1).unwrap();
    let d = dalang_check(&SpectralNoiseModel::white(1).unwrap(), &b1).unwrap();
    assert!(d.finite && (d.value - PI).abs() < 1e-7);

    let b2 = CharacteristicExponent::brownian(2).unwrap();
    assert!(!dalang_check(&SpectralNoiseModel::white(2).unwrap(), &b2).unwrap().finite);

    let s = CharacteristicExponent::stable(1, 1.5).unwrap();
    assert!(dalang_check(&SpectralNoiseModel::riesz(1, 0.5).unwrap(), &s).unwrap().finite);
}

#[test]
fn dalang_gaussian_spectrum_closed_form() {
    // 2∫ e^{-r²}/(1+r²) dr = π e erfc(1)
    let b = CharacteristicExponent::brownian(1).unwrap();
    let g = SpectralNoiseModel::gaussian(1, 1.0).unwrap();
    let d = dalang_check(&g, &b).unwrap();
    let exact = PI * std::f64::consts::E * 0.15729920705028513;
    assert!((d.value - exact).abs() < 1e-7, "{} {exact}", d.value);
}

#[test]
fn dalang_in_the_plane_with_riesz() {
    // 2π∫ r^{β-1}/(1+r²) dr = π²/sin(πβ/2)
    let b = CharacteristicExponent::brownian(2).unwrap();
    let r = SpectralNoiseModel::riesz(2, 1.0).unwrap();
    let d = dalang_check(&r, &b).unwrap();
    assert!((d.value - PI * PI).abs() < 1e-6, "{}", d.value);
}

#[test]
fn index_examples() {
    let b = CharacteristicExponent::brownian(1).unwrap();
    let w = compute_indices(&SpectralNoiseModel::white(1).unwrap(), &b).unwrap();
    for v in [w.iota_u, w.iota_m, w.iota_l] {
        assert!((v - 0.5).abs() < 1e-3);
    }
    assert_eq!(w.positivity, [true; 3]);

    let s = CharacteristicExponent::stable(1, 1.5).unwrap();
    let r = compute_indices(&SpectralNoiseModel::riesz(1, 0.5).unwrap(), &s).unwrap();
    assert!((r.iota_u - 2.0 / 3.0).abs() < 1e-3);
    assert!((r.iota_m - 2.0 / 3.0).abs() < 1e-3);
    assert!((r.iota_l - 0.5).abs() < 1e-3);

    for e in sweep_exponents() {
        let f = compute_indices(&SpectralNoiseModel::gaussian(1, 1.0).unwrap(), &e).unwrap();
        assert_eq!((f.iota_u, f.iota_m, f.iota_l), (1.0, 1.0, 1.0), "{}", e.name());
    }
}

#[test]
fn lemma31_examples() {
    let b = CharacteristicExponent::brownian(1).unwrap();
    let w = verify_lemma31(&SpectralNoiseModel::white(1).unwrap(), &b).unwrap();
    assert_eq!(w.positivity, [true; 3]);
    assert!(w.positivity_agree && w.values_agree);

    let s = CharacteristicExponent::stable(1, 1.5).unwrap();
    let r = verify_lemma31(&SpectralNoiseModel::riesz(1, 0.5).unwrap(), &s).unwrap();
    assert_eq!(r.positivity, [true; 3]);
    assert!(r.positivity_agree);
    assert!(!r.values_agree);
}

#[test]
fn log_tail_is_indeterminate() {
    let b = CharacteristicExponent::brownian(1).unwrap();
    let c = SpectralNoiseModel::custom(1, -1.0, -1.0).unwrap();
    let ix = compute_indices(&c, &b).unwrap();
    assert_eq!(ix.method, IndexMethod::Bisection);
    assert!(ix.indeterminate);
    let u = ix.brackets[0];
    assert!(!u.determinate && u.lo < u.hi && u.hi <= 1.0);
}

#[test]
fn log_tail_brackets_the_power_law_boundary() {
    let s = CharacteristicExponent::stable(1, 1.5).unwrap();
    let c = SpectralNoiseModel::custom(1, -0.5, 1.0).unwrap();
    let ix = compute_indices(&c, &s).unwrap();
    let u = ix.brackets[0];
    assert!(u.lo <= 2.0 / 3.0 && 2.0 / 3.0 <= u.hi, "{u:?}");
    assert!(!u.determinate);
    assert!(u.hi - u.lo < 0.1);
}

#[test]
fn catalog_sweep_ordering_and_positivity() {
    let mut cases = 0;
    for e in sweep_exponents() {
        for noise in sweep_noises() {
            let r = verify_lemma31(&noise, &e).unwrap();
            assert!(r.positivity_agree, "{} + {}", noise.name(), e.name());
            assert!(r.indices.ordered(), "{} + {}: {:?}", noise.name(), e.name(), r.indices);
            cases += 1;
        }
    }
    assert_eq!(cases, 20);
}

#[test]
fn lemma31_requires_growth() {
    let atoms = vec![levyfield::levy::Atom {
        location: vec![1.0],
        mass: 1.0,
    }];
    let cp = CharacteristicExponent::compound_poisson(1, atoms).unwrap();
    let w = SpectralNoiseModel::white(1).unwrap();
    assert!(matches!(verify_lemma31(&w, &cp), Err(Error::AssumptionViolated(_))));
}

fn moments(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let m = samples.iter().sum::<f64>() / n;
    let v = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn white_noise_site_statistics() {
    let lat = TorusLattice::new(1, 64, 8.0).unwrap();
    let noise = SpectralNoiseModel::space_time_white(1).unwrap();
    let dt = 0.01;
    let draws: Vec<Vec<f64>> = (0..10_000)
        .map(|s| synthesize_noise_increment(&noise, &lat, dt, s).unwrap())
        .collect();
    let sq: Vec<f64> = draws.iter().map(|w| w[5] * w[5]).collect();
    let (var, se) = moments(&sq);
    let target = dt / lat.dx();
    assert!((var - target).abs() < 3.0 * se, "{var} vs {target} ± {se}");
    let cross: Vec<f64> = draws.iter().map(|w| w[5] * w[9]).collect();
    let (cov, se) = moments(&cross);
    assert!(cov.abs() < 3.0 * se, "{cov} ± {se}");
}

#[test]
fn riesz_covariance_ratio() {
    let lat = TorusLattice::new(1, 64, 16.0).unwrap();
    let noise = SpectralNoiseModel::riesz(1, 0.5).unwrap();
    let weights = mode_weights(&noise, &lat).unwrap();
    assert_eq!(weights.zero_mode, ZeroMode::Dropped);
    assert_eq!(weights.weights[0], 0.0);
    let (j1, j2) = (2, 4);
    let exact = weights.covariance_along_axis(&lat, j1) / weights.covariance_along_axis(&lat, j2);

    let mut a = Vec::new();
    let mut b = Vec::new();
    for s in 0..10_000 {
        let w = synthesize_noise_increment(&noise, &lat, 1.0, s).unwrap();
        let n = w.len();
        a.push((0..n).map(|i| w[i] * w[(i + j1) % n]).sum::<f64>() / n as f64);
        b.push((0..n).map(|i| w[i] * w[(i + j2) % n]).sum::<f64>() / n as f64);
    }
    let (ma, _) = moments(&a);
    let (mb, _) = moments(&b);
    let ratio = ma / mb;
    let resid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - ratio * y).collect();
    let (_, se) = moments(&resid);
    let se = se / mb.abs();
    assert!((ratio - exact).abs() < 3.0 * se, "{ratio} vs {exact} ± {se}");
}

#[test]
fn spectral_variance_per_mode() {
    let lat = TorusLattice::new(1, 32, 4.0).unwrap();
    let noise = SpectralNoiseModel::algebraic(1, 1.0, 2.0).unwrap();
    let weights = mode_weights(&noise, &lat).unwrap();
    assert_eq!(weights.zero_mode, ZeroMode::Limit);
    let dt = 0.1;
    let modes = lat.modes();
    let draws: Vec<Vec<f64>> = (0..10_000)
        .map(|s| synthesize_noise_increment(&noise, &lat, dt, s).unwrap())
        .collect();
    for k in [0, 1, 5, 16] {
        let xi = modes[k][0];
        let power: Vec<f64> = draws
            .iter()
            .map(|w| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, v) in w.iter().enumerate() {
                    let x = j as f64 * lat.dx();
                    re += v * (xi * x).cos();
                    im -= v * (xi * x).sin();
                }
                (re * re + im * im) / (lat.len() * lat.len()) as f64
            })
            .collect();
        let (m, se) = moments(&power);
        let target = weights.weights[k] * dt;
        assert!((m - target).abs() < 3.0 * se, "mode {k}: {m} vs {target} ± {se}");
    }
}

#[test]
fn synthesis_is_deterministic() {
    let lat = TorusLattice::new(2, 16, 4.0).unwrap();
    let noise = SpectralNoiseModel::riesz(2, 1.0).unwrap();
    let a = synthesize_noise_increment(&noise, &lat, 0.01, 42).unwrap();
    let b = synthesize_noise_increment(&noise, &lat, 0.01, 42).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, synthesize_noise_increment(&noise, &lat, 0.01, 43).unwrap());
}

#[test]
fn rejects_bad_lattices() {
    assert!(TorusLattice::new(1, 100, 1.0).is_err());
    assert!(TorusLattice::new(1, 64, 0.0).is_err());
    let lat = TorusLattice::new(2, 16, 1.0).unwrap();
    let noise = SpectralNoiseModel::white(1).unwrap();
    assert!(matches!(
        synthesize_noise_increment(&noise, &lat, 0.1, 0),
        Err(Error::DimensionMismatch { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn indices_are_ordered(alpha in 0.3f64..1.99, beta in 0.05f64..0.99, lambda in 0.2f64..3.0) {
        let noise = SpectralNoiseModel::riesz(1, beta).unwrap();
        for e in [
            CharacteristicExponent::stable(1, alpha).unwrap(),
            CharacteristicExponent::tempered_stable(1, alpha, lambda).unwrap(),
        ] {
            if let Ok(ix) = compute_indices(&noise, &e) {
                prop_assert!(ix.ordered());
                prop_assert!(ix.positivity.iter().all(|p| *p == ix.positivity[0]));
            }
        }
    }

    #[test]
    fn dalang_is_monotone_in_beta(alpha in 0.3f64..1.99, b1 in 0.05f64..1.0, b2 in 0.05f64..1.0) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let e = CharacteristicExponent::stable(1, alpha).unwrap();
        let d_lo = dalang_check(&SpectralNoiseModel::riesz(1, lo).unwrap(), &e).unwrap();
        let d_hi = dalang_check(&SpectralNoiseModel::riesz(1, hi).unwrap(), &e).unwrap();
        prop_assert!(!(d_hi.finite && !d_lo.finite));
    }
}
