use std::f64::consts::PI;

use levyfield::levy::{
    assess, check_assumption2, stable_levy_constant, verify_moment_equivalence, Atom, LevyMeasure, LevyTriplet,
};
use levyfield::{CharacteristicExponent, Error};
use proptest::prelude::*;

fn power_law(c: f64, alpha: f64, r_min: f64, r_max: f64) -> CharacteristicExponent {
    let t = LevyTriplet::new(
        vec![0.0],
        vec![0.0],
        LevyMeasure::PowerLaw {
            c,
            alpha,
            r_min,
            r_max,
        },
    )
    .unwrap();
    CharacteristicExponent::from_triplet(t).unwrap()
}

#[test]
fn closed_forms() {
    let b = CharacteristicExponent::brownian(2).unwrap();
    assert!((b.psi(&[1.0, 2.0]).unwrap().re - 5.0).abs() < 1e-14);
    let c = CharacteristicExponent::cauchy(1).unwrap();
    assert!((c.psi(&[-3.0]).unwrap().re - 3.0).abs() < 1e-14);
    let s = CharacteristicExponent::stable(1, 1.5).unwrap();
    assert!((s.psi(&[4.0]).unwrap().re - 8.0).abs() < 1e-12);
}

#[test]
fn stable_triplet_reproduces_the_closed_form() {
    let alpha = 1.5;
    let t = power_law(stable_levy_constant(1, alpha, 1.0), alpha, 0.0, f64::INFINITY);
    for xi in [0.1, 1.0, 7.5] {
        let (v, err) = t.psi_with_error(&[xi]).unwrap();
        assert!((v.re - xi.powf(alpha)).abs() < 1e-6 * xi.powf(alpha).max(1.0) + err, "{xi}");
        assert!(v.im.abs() < 1e-9);
    }
}

#[test]
fn symmetric_atoms_give_a_cosine_sum() {
    let atoms = vec![
        Atom {
            location: vec![0.5],
            mass: 2.0,
        },
        Atom {
            location: vec![-0.5],
            mass: 2.0,
        },
    ];
    let e = CharacteristicExponent::compound_poisson(1, atoms).unwrap();
    for xi in [0.3, 2.0, PI] {
        let v = e.psi(&[xi]).unwrap();
        let exact = 4.0 * (1.0 - (0.5 * xi).cos());
        assert!((v.re - exact).abs() < 1e-13 && v.im.abs() < 1e-13);
    }
    assert!(!e.nondegenerate());
}

#[test]
fn gaussian_component_sits_at_the_boundary() {
    let b = CharacteristicExponent::brownian(1).unwrap();
    let strict = assess(&b, 0.5, false).unwrap();
    assert!(!strict.assumption1_holds);
    let limit = assess(&b, 0.5, true).unwrap();
    assert!(limit.assumption1_holds && limit.limiting_case);
    let s = assess(&CharacteristicExponent::stable(1, 1.5).unwrap(), 0.7, false).unwrap();
    assert!(s.assumption1_holds && s.assumption2_holds);
    assert!((s.beta_inf - 1.5).abs() < 0.05);
}

#[test]
fn assumption2_boundary_for_cauchy() {
    let c = CharacteristicExponent::cauchy(1).unwrap();
    assert!(check_assumption2(&c, 0.999).unwrap().finite);
    assert!(check_assumption2(&c, 1.0).is_err());
}

#[test]
fn heavy_power_tail_has_no_half_moment() {
    // ν(dx) = |x|^{-1.4} dx on |x| > 1
    let e = power_law(1.0, 0.4, 1.0, f64::INFINITY);
    let r = verify_moment_equivalence(&e, 0.5).unwrap();
    assert_eq!(r.finite, [false; 4]);
    assert!(r.agree);
}

#[test]
fn stable_measure_has_the_half_moment() {
    let e = power_law(stable_levy_constant(1, 1.5, 1.0), 1.5, 0.0, f64::INFINITY);
    let r = verify_moment_equivalence(&e, 0.5).unwrap();
    assert_eq!(r.finite, [true; 4]);
    assert!(r.agree);
}

#[test]
fn dimension_is_checked() {
    let e = CharacteristicExponent::stable(2, 1.2).unwrap();
    assert!(matches!(e.psi(&[1.0]), Err(Error::DimensionMismatch { .. })));
    assert!(CharacteristicExponent::brownian(4).is_err());
    assert!(CharacteristicExponent::stable(1, 2.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_part_is_nonnegative_and_symmetric(alpha in 0.2f64..2.0, lambda in 0.1f64..3.0, xi in -50.0f64..50.0) {
        let t = CharacteristicExponent::tempered_stable(1, alpha.min(1.95), lambda).unwrap();
        let a = t.psi(&[xi]).unwrap();
        let b = t.psi(&[-xi]).unwrap();
        prop_assert!(a.re >= -1e-12);
        prop_assert!((a.re - b.re).abs() <= 1e-9 * a.re.abs().max(1.0));
        prop_assert!((a.im + b.im).abs() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn stable_scaling(alpha in 0.1f64..2.0, c in 0.1f64..10.0, x in 0.05f64..5.0, y in -5.0f64..5.0) {
        let s = CharacteristicExponent::stable(2, alpha).unwrap();
        let a = s.psi(&[c * x, c * y]).unwrap().re;
        let b = s.psi(&[x, y]).unwrap().re;
        prop_assert!((a - c.powf(alpha) * b).abs() <= 1e-10 * a.max(1.0));
    }
}
