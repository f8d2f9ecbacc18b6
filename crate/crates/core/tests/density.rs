use std::f64::consts::PI;

use levyfield::density::*;
use levyfield::stats::logspace;
use levyfield::{CharacteristicExponent, Error};

fn brownian() -> CharacteristicExponent {
    CharacteristicExponent::brownian(1).unwrap()
}

fn cauchy() -> CharacteristicExponent {
    CharacteristicExponent::cauchy(1).unwrap()
}

fn catalog_1d() -> Vec<CharacteristicExponent> {
    vec![
        brownian(),
        cauchy(),
        CharacteristicExponent::stable(1, 1.5).unwrap(),
        CharacteristicExponent::tempered_stable(1, 1.5, 1.0).unwrap(),
    ]
}

#[test]
fn point_values_at_origin() {
    for (e, exact) in [(brownian(), 0.28209479177387814), (cauchy(), 1.0 / PI)] {
        let lat = Lattice::default_for(&e, 1.0).unwrap();
        let g = invert_density(&e, 1.0, &lat, &Derivative::zero(1)).unwrap();
        assert!((g.nearest(&[0.0]) - exact).abs() < 1e-9);
        assert!(g.imaginary_residue < RESIDUE_TOLERANCE);
    }
}

#[test]
fn normalization_across_catalog() {
    for e in catalog_1d() {
        for t in [0.1, 1.0] {
            let lat = Lattice::default_for(&e, t).unwrap();
            let g = invert_density(&e, t, &lat, &Derivative::zero(1)).unwrap();
            let total = g.trapezoid_mass() + g.boundary_mass;
            assert!((total - 1.0).abs() < 1e-6, "{} t={t}: {total}", e.name());
            assert!(g.satisfies_invariants(), "{} t={t}", e.name());
        }
    }
}

#[test]
fn stable_density_matches_series_at_origin() {
    // p_1(0) = Γ(1 + 1/α)/π for Ψ = |ξ|^α
    let alpha: f64 = 1.5;
    let e = CharacteristicExponent::stable(1, alpha).unwrap();
    let lat = Lattice::default_for(&e, 1.0).unwrap();
    let g = invert_density(&e, 1.0, &lat, &Derivative::zero(1)).unwrap();
    let exact = libm::tgamma(1.0 + 1.0 / alpha) / PI;
    assert!((g.nearest(&[0.0]) - exact).abs() < 1e-9);
}

#[test]
fn two_dimensional_gaussian() {
    let e = CharacteristicExponent::brownian(2).unwrap();
    let lat = Lattice::default_for(&e, 1.0).unwrap();
    let g = invert_density(&e, 1.0, &lat, &Derivative::zero(2)).unwrap();
    assert!((g.nearest(&[0.0, 0.0]) - 1.0 / (4.0 * PI)).abs() < 1e-8);
    let x = [lat.coord(40), lat.coord(70)];
    let exact = (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp() / (4.0 * PI);
    assert!((g.at(&[40, 70]) - exact).abs() < 1e-8);
    let total = g.trapezoid_mass() + g.boundary_mass;
    assert!((total - 1.0).abs() < 1e-5, "{} {}", g.trapezoid_mass(), g.boundary_mass);
    assert!(g.satisfies_invariants());
}

#[test]
fn two_dimensional_cauchy() {
    // p_t(x) = t / (2π (t² + ‖x‖²)^{3/2})
    let e = CharacteristicExponent::cauchy(2).unwrap();
    let lat = Lattice::default_for(&e, 1.0).unwrap();
    let g = invert_density(&e, 1.0, &lat, &Derivative::zero(2)).unwrap();
    let c = lat.half_steps();
    for (i, j) in [(c, c), (c + 20, c - 7), (5, c)] {
        let (x, y) = (lat.coord(i), lat.coord(j));
        let exact = 1.0 / (2.0 * PI * (1.0 + x * x + y * y).powf(1.5));
        assert!((g.at(&[i, j]) - exact).abs() < 1e-7, "{i} {j}");
    }
}

#[test]
fn chapman_kolmogorov() {
    for e in [brownian(), cauchy()] {
        let lat = Lattice::new(1, 0.01, 40.0).unwrap();
        let d = Derivative::zero(1);
        let ps = invert_density(&e, 0.4, &lat, &d).unwrap();
        let pt = invert_density(&e, 0.6, &lat, &d).unwrap();
        let pst = invert_density(&e, 1.0, &lat, &d).unwrap();
        let m = lat.half_steps() as i64;
        for j in [m - 150, m, m + 37, m + 300] {
            let mut acc = 0.0;
            for k in -m..=m {
                let i = j - k;
                if (0..=2 * m).contains(&i) {
                    acc += ps.values[(k + m) as usize] * pt.values[i as usize];
                }
            }
            acc *= lat.dx;
            let exact = pst.values[j as usize];
            assert!((acc - exact).abs() < 1e-4, "{} {j}: {acc} vs {exact}", e.name());
        }
    }
}

#[test]
fn sup_increment_oracle_and_scaling() {
    let e = brownian();
    let s = sup_increment_space(&e, 1.0, &[0.1], &Derivative::zero(1), 1.0).unwrap();
    assert!((s.value - 0.012093496639250412).abs() < 1e-6, "{}", s.value);
    let z = sup_increment_space(&e, 1.0, &[0.0], &Derivative::zero(1), 1.0).unwrap();
    assert_eq!(z.value, 0.0);
    let a = sup_increment_space(&e, 0.5, &[0.05], &Derivative::zero(1), 1.0).unwrap();
    let b = sup_increment_space(&e, 2.0, &[0.1], &Derivative::zero(1), 1.0).unwrap();
    assert!((b.value - a.value / 2.0).abs() < 1e-5 * a.value, "{} {}", a.value, b.value);
}

#[test]
fn sup_envelope_has_one_constant() {
    for e in [brownian(), cauchy()] {
        let fit = fit_sup_envelope(&e, 0.5, &[0.1, 0.5, 2.0], &logspace(1e-3, 0.5, 4), &[0, 1]).unwrap();
        assert!(fit.holds && fit.fitted_c.is_finite(), "{}", e.name());
        for &(_, _, _, v, env) in &fit.points {
            assert!(v <= fit.fitted_c * env * (1.0 + 1e-12));
        }
    }
}

#[test]
fn l1_space_oracle() {
    let e = brownian();
    let r = l1_increment_space(&e, 1.0, &[1.0]).unwrap();
    assert!((r.value - 0.5526527803364738).abs() < 1e-6, "{:?}", r);
    assert_eq!(r.tail_method, TailMethod::Monotone);
    assert_eq!(l1_increment_space(&e, 1.0, &[0.0]).unwrap().value, 0.0);
    assert!(matches!(l1_increment_space(&e, 1.0, &[1.5]), Err(Error::InvalidParameter { .. })));
}

#[test]
fn l1_space_cauchy_closed_form() {
    // ∫|p(x+h)-p(x)| = (4/π) atan(h/(2t)) for the Cauchy law
    let e = cauchy();
    for (t, h) in [(1.0, 1.0), (0.25, 0.01), (2.0, 0.5)] {
        let r = l1_increment_space(&e, t, &[h]).unwrap();
        let exact = 4.0 / PI * (h / (2.0 * t)).atan();
        assert!((r.value - exact).abs() < 1e-6, "t={t} h={h}: {} vs {exact}", r.value);
    }
}

#[test]
fn l1_time_oracle() {
    let e = brownian();
    let a = l1_increment_time(&e, 1.0, 1.0).unwrap();
    assert!((a.value - 0.3321281499670252).abs() < 1e-6, "{:?}", a);
    let b = l1_increment_time(&e, 1.0, 0.5).unwrap();
    assert!((b.value - 0.1955522840169961).abs() < 1e-6, "{:?}", b);
    assert!(b.value < a.value);
    assert_eq!(l1_increment_time(&e, 1.0, 0.0).unwrap().value, 0.0);
}

#[test]
fn l1_fit_brownian_and_cauchy() {
    let params = L1BoundParams::new(1.0, 0.9, 0.9, 0.12, 0.5).unwrap();
    let t_grid = [0.25, 0.5, 1.0, 2.0];
    let h_grid = logspace(1e-3, 1.0, 8);
    for e in [brownian(), cauchy()] {
        let fit = fit_l1_exponents(&e, &params, IncrementKind::Space, &t_grid, &h_grid).unwrap();
        assert!(fit.passes, "{}: {:?}", e.name(), fit.step_slopes);
        assert!(fit.max_value <= 2.0);
    }
}

#[test]
fn l1_fit_needs_two_points() {
    let params = L1BoundParams::new(1.0, 0.5, 0.5, 0.1, 0.5).unwrap();
    assert!(matches!(
        fit_l1_exponents(&brownian(), &params, IncrementKind::Space, &[1.0], &[0.1, 0.2]),
        Err(Error::InsufficientGrid(_))
    ));
}

#[test]
fn params_are_validated() {
    assert!(L1BoundParams::new(1.0, 0.5, 0.5, 0.25, 0.5).is_err());
    assert!(L1BoundParams::new(0.0, 0.5, 0.5, 0.1, 0.5).is_err());
    assert!(L1BoundParams::new(1.0, 1.0, 0.5, 0.1, 0.5).is_err());
}

#[test]
fn cache_returns_shared_entries() {
    let cache = DensityCache::new();
    let e = cauchy();
    let lat = Lattice::default_for(&e, 1.0).unwrap();
    let d = Derivative::zero(1);
    let a = cache.get_or_compute(&e, 1.0, &lat, &d).unwrap();
    let b = cache.get_or_compute(&e, 1.0, &lat, &d).unwrap();
    assert!(std::sync::Arc::ptr_eq(&a, &b));
    assert_eq!(cache.len(), 1);
    std::thread::scope(|s| {
        for t in [0.5, 0.75, 1.5] {
            let (cache, e, d) = (&cache, &e, &d);
            s.spawn(move || {
                let lat = Lattice::default_for(e, t).unwrap();
                cache.get_or_compute(e, t, &lat, d).unwrap();
            });
        }
    });
    assert_eq!(cache.len(), 4);
}
