//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use levyfield::config::{parse_noise, ExperimentConfig, MomentsBlock, ProcessSpec, SimulateBlock};
use levyfield::density::{fit_l1_exponents, invert_density, Derivative, IncrementKind, L1BoundParams, Lattice};
use levyfield::experiment::{self, additive_benchmark, BenchmarkDesign, Lemma};
use levyfield::moments::{estimate_fractional_moment, verify_growth};
use levyfield::noise::{compute_indices, verify_lemma31, SpectralNoiseModel};
use levyfield::spde::paper_ranges;
use levyfield::stats::logspace;
use levyfield::{CharacteristicExponent, Result};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

fn catalog_1d() -> Result<Vec<CharacteristicExponent>> {
    Ok(vec![
        CharacteristicExponent::brownian(1)?,
        CharacteristicExponent::cauchy(1)?,
        CharacteristicExponent::stable(1, 1.5)?,
        CharacteristicExponent::tempered_stable(1, 1.5, 1.0)?,
    ])
}

fn density_oracle() -> Result<Verdict> {
    let mut ok = true;
    let mut notes = Vec::new();
    for (e, exact) in [
        (CharacteristicExponent::brownian(1)?, (4.0 * PI).powf(-0.5)),
        (CharacteristicExponent::cauchy(1)?, 1.0 / PI),
    ] {
        let g = invert_density(&e, 1.0, &Lattice::default_for(&e, 1.0)?, &Derivative::zero(1))?;
        let err = (g.nearest(&[0.0]) - exact).abs();
        ok &= err < 1e-6;
        notes.push(format!("{} p_1(0) err {err:.1e}", e.name()));
    }
    let mut worst = 0.0f64;
    for e in catalog_1d()? {
        for t in [0.1, 1.0] {
            let g = invert_density(&e, t, &Lattice::default_for(&e, t)?, &Derivative::zero(1))?;
            worst = worst.max((g.trapezoid_mass() + g.boundary_mass - 1.0).abs());
        }
    }
    ok &= worst < 1e-6;
    notes.push(format!("max normalization err {worst:.1e}"));
    verdict(ok, notes.join("; "))
}

fn lemma25_suite() -> Result<Verdict> {
    let params = L1BoundParams::new(1.0, 0.9, 0.9, 0.12, 0.5)?;
    let t_grid = [0.25, 0.5, 1.0, 2.0];
    let steps = logspace(1e-3, 1.0, 8);
    let mut ok = true;
    let mut notes = Vec::new();
    for e in [CharacteristicExponent::brownian(1)?, CharacteristicExponent::cauchy(1)?] {
        for kind in [IncrementKind::Space, IncrementKind::Time] {
            let f = fit_l1_exponents(&e, &params, kind, &t_grid, &steps)?;
            let under = f
                .values
                .iter()
                .zip(&f.bounds)
                .all(|(v, b)| v.iter().zip(b).all(|(v, b)| *v <= f.fitted_c * b * (1.0 + 1e-12)));
            ok &= under && f.max_value <= 2.0 && f.fitted_c.is_finite() && f.passes;
            notes.push(format!("{} {kind:?} C={:.3} max={:.3}", e.name(), f.fitted_c, f.max_value));
            if e.name() == "brownian" && kind == IncrementKind::Space {
                let v = f.values[2][7];
                ok &= (v - 0.553).abs() <= 0.005;
                notes.push(format!("brownian(t=1,h=1)={v:.4}"));
            }
        }
    }
    verdict(ok, notes.join("; "))
}

fn moments_suite() -> Result<Verdict> {
    let mut ok = true;
    let mut notes = Vec::new();
    let c = estimate_fractional_moment(&CharacteristicExponent::cauchy(1)?, 1.0, 0.5, 1_000_000, 1)?;
    let z = (c.mc_value - 2f64.sqrt()).abs() / c.mc_stderr;
    ok &= z <= 3.0;
    notes.push(format!("cauchy E|X|^0.5={:.5} ({z:.2} SE)", c.mc_value));

    let t_grid = logspace(0.01, 1.0, 6);
    let s = verify_growth(&CharacteristicExponent::stable(1, 1.5)?, 0.75, &t_grid, 0.49 * 0.75, 200_000, 2)?;
    ok &= (s.slope - 0.5).abs() <= 0.03;
    notes.push(format!("stable1.5 slope {:.4}", s.slope));

    let kappa0 = 0.5;
    let catalog = [
        ProcessSpec::parse("brownian", 1)?,
        ProcessSpec::parse("cauchy", 1)?,
        ProcessSpec::parse("stable:1.5", 1)?,
        ProcessSpec::parse("tempered_stable:1.5:1", 1)?,
        ProcessSpec::CompoundPoisson {
            dim: 1,
            atoms: vec![
                levyfield::levy::Atom {
                    location: vec![1.0],
                    mass: 1.0,
                },
                levyfield::levy::Atom {
                    location: vec![-2.0],
                    mass: 0.5,
                },
            ],
        },
    ];
    for p in catalog {
        let g = verify_growth(&p.build()?, kappa0, &t_grid, 0.49 * kappa0, 100_000, 3)?;
        ok &= g.holds && g.fitted_c.is_finite();
        notes.push(format!("{} C={:.3}", p.label(), g.fitted_c));
    }
    verdict(ok, notes.join("; "))
}

fn indices_suite() -> Result<Verdict> {
    let mut ok = true;
    let mut notes = Vec::new();
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-3;
    let w = compute_indices(&SpectralNoiseModel::white(1)?, &CharacteristicExponent::brownian(1)?)?;
    ok &= near(w.iota_u, 0.5) && near(w.iota_m, 0.5) && near(w.iota_l, 0.5);
    notes.push(format!("white+brownian ({:.4}, {:.4}, {:.4})", w.iota_u, w.iota_m, w.iota_l));
    let r = compute_indices(&SpectralNoiseModel::riesz(1, 0.5)?, &CharacteristicExponent::stable(1, 1.5)?)?;
    ok &= near(r.iota_u, 2.0 / 3.0) && near(r.iota_m, 2.0 / 3.0) && near(r.iota_l, 0.5);
    notes.push(format!("riesz+stable ({:.4}, {:.4}, {:.4})", r.iota_u, r.iota_m, r.iota_l));

    let exponents = [
        CharacteristicExponent::stable(1, 0.8)?,
        CharacteristicExponent::cauchy(1)?,
        CharacteristicExponent::stable(1, 1.5)?,
        CharacteristicExponent::tempered_stable(1, 1.5, 1.0)?,
        CharacteristicExponent::brownian(1)?,
    ];
    let noises = ["white", "riesz:0.5", "gaussian:1", "algebraic:1:1.5"];
    let mut cases = 0;
    let mut agree = 0;
    for e in &exponents {
        for name in noises {
            let noise = parse_noise(name, 1)?;
            cases += 1;
            let rep = verify_lemma31(&noise, e)?;
            if rep.positivity_agree && rep.indices.ordered() {
                agree += 1;
            }
        }
    }
    ok &= cases == 20 && agree == cases;
    notes.push(format!("sweep {agree}/{cases} ordered with positivity agreement"));
    verdict(ok, notes.join("; "))
}

fn spde_benchmark() -> Result<Verdict> {
    let coarse = additive_benchmark(&BenchmarkDesign::standard(1e-4))?;
    let fine = additive_benchmark(&BenchmarkDesign::standard(5e-5))?;
    let target = (1.0 / (2.0 * PI)).sqrt();
    let rel = (coarse.variance - target).abs() / target;
    let ts = coarse.time.fits[0].exponent;
    let ss = coarse.space.fits[0].exponent;
    let dts = (fine.time.fits[0].exponent - ts).abs();
    let dss = (fine.space.fits[0].exponent - ss).abs();
    let ok = rel <= 0.05 && (ts - 0.25).abs() <= 0.03 && (ss - 0.5).abs() <= 0.03 && dts < 0.02 && dss < 0.02;
    verdict(
        ok,
        format!(
            "var {:.4} (rel err {:.3}); time {ts:.4} [{:.4}, {:.4}]; space {ss:.4} [{:.4}, {:.4}]; dt/2 shifts time {dts:.4} space {dss:.4}",
            coarse.variance,
            rel,
            coarse.time.fits[0].ci_lo,
            coarse.time.fits[0].ci_hi,
            coarse.space.fits[0].ci_lo,
            coarse.space.fits[0].ci_hi,
        ),
    )
}

fn range_arithmetic() -> Result<Verdict> {
    let r = paper_ranges(
        &CharacteristicExponent::stable(1, 1.5)?,
        &SpectralNoiseModel::riesz(1, 0.5)?,
        0.7,
        0.6,
        false,
    )?;
    // independently evaluated before the build
    let ok = (r.alpha_end - 0.4117647058823529).abs() <= 1e-4
        && (r.k - 0.6931372549019608).abs() <= 1e-4
        && (r.k_tilde - 0.9676470588235294).abs() <= 1e-4;
    verdict(ok, format!("alpha_end {:.6}, K {:.6}, K~ {:.6}", r.alpha_end, r.k, r.k_tilde))
}

fn reports(dir: &std::path::Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut idx = ExperimentConfig::new(ProcessSpec::parse("stable:1.5", 1)?);
    idx.noise = Some(parse_noise("riesz:0.5", 1)?);
    out.push(experiment::run_indices(&idx)?.json);

    let mut m = ExperimentConfig::new(ProcessSpec::parse("cauchy", 1)?);
    m.seed = 42;
    m.moments = Some(MomentsBlock {
        kappa0: 0.5,
        t_grid: vec![0.25, 1.0],
        replicas: 50_000,
    });
    out.push(experiment::run_moments(&m)?.json);

    let mut s = ExperimentConfig::new(ProcessSpec::parse("stable:1.5", 1)?);
    s.noise = Some(parse_noise("riesz:0.5", 1)?);
    s.seed = 9;
    s.output_dir = Some(dir.to_path_buf());
    s.simulate = Some(SimulateBlock {
        horizon: 0.5,
        dt: 1e-3,
        points: 256,
        length: 4.0,
        replicas: 16,
        record_every: 10,
    });
    out.push(experiment::run_simulate(&s)?.json);

    let mut lem = ExperimentConfig::new(ProcessSpec::parse("brownian", 1)?);
    lem.seed = 5;
    out.push(experiment::run_verify_lemma(&lem, Lemma::L23)?.json);
    Ok(out)
}

fn determinism() -> Result<Verdict> {
    let a = tempfile::tempdir()?;
    let b = tempfile::tempdir()?;
    let first = reports(a.path())?;
    let second = reports(b.path())?;
    let mut same_paths = true;
    for entry in std::fs::read_dir(a.path().join("paths"))? {
        let p = entry?.path();
        let q = b.path().join("paths").join(p.file_name().expect("file name"));
        same_paths &= std::fs::read(&p)? == std::fs::read(&q)?;
    }
    let same = first == second;
    verdict(
        same && same_paths,
        format!("{} reports byte-identical: {same}; stored paths identical: {same_paths}", first.len()),
    )
}

type Criterion = (&'static str, Duration, fn() -> Result<Verdict>);

fn main() {
    let criteria: [Criterion; 7] = [
        ("density oracle", Duration::from_secs(10), density_oracle),
        ("L1 increment suite", Duration::from_secs(120), lemma25_suite),
        ("moments suite", Duration::from_secs(180), moments_suite),
        ("indices suite", Duration::from_secs(30), indices_suite),
        ("paper-range arithmetic", Duration::from_secs(10), range_arithmetic),
        ("determinism", Duration::from_secs(300), determinism),
        ("SPDE additive benchmark", Duration::from_secs(1200), spde_benchmark),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok(v) => (v.passed && elapsed <= budget, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} {name}: {detail} ({:.1}s, budget {}s)",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
