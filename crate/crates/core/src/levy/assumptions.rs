use serde::Serialize;

use super::{angular_design, CharacteristicExponent};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_radial_to, QuadConfig};
use crate::stats::log_log_fit;

/// Minimum-over-rays slope of `log Re Ψ` against `log ‖ξ‖` on the last
/// decade of radii; a computable surrogate for the lim inf growth index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub value: f64,
    pub per_ray: Vec<f64>,
    pub declared: f64,
    pub disagreement: bool,
    pub assumption1_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption2Report {
    pub kappa0: f64,
    pub finite: bool,
    pub value: f64,
    pub error: f64,
    /// `(ε, ∫_{ε≤‖ξ‖≤1})` for a decreasing sequence of inner cutoffs.
    pub refinements: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub beta_inf: f64,
    pub kappa0: f64,
    pub assumption1_holds: bool,
    pub assumption2_holds: bool,
    /// Set when `β_∞ = 2` was accepted as a limiting case.
    pub limiting_case: bool,
    pub beta: BetaEstimate,
    pub assumption2: Assumption2Report,
}

/// Equivalent statements about the `κ₀`-th moment: `E‖X₁‖^κ₀`, the
/// large-jump moment `∫_{‖x‖>1}‖x‖^κ₀ ν(dx)`, and the origin integrals of
/// `Re Ψ` and `|Ψ|` against `‖ξ‖^{-n-κ₀}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEquivalence {
    pub kappa0: f64,
    pub finite: [bool; 4],
    pub values: [f64; 4],
    pub agree: bool,
}

fn ray_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count.max(1))
            .map(|k| {
                let th = 2.0 * PI * k as f64 / count.max(1) as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let m = count.max(1);
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let s = (1.0 - z * z).sqrt();
                    let ph = golden * k as f64;
                    vec![s * ph.cos(), s * ph.sin(), z]
                })
                .collect()
        }
    }
}

pub fn estimate_beta_inf(
    exponent: &CharacteristicExponent,
    ray_count: usize,
    radius_schedule: &[f64],
) -> Result<BetaEstimate> {
    if radius_schedule.windows(2).any(|w| !(w[1] > w[0])) || radius_schedule.is_empty() {
        return Err(invalid("radius_schedule", "radii must be strictly increasing"));
    }
    let r_max = *radius_schedule.last().unwrap();
    if r_max < 1e3 {
        return Err(invalid("radius_schedule", "the largest radius must be at least 1e3"));
    }
    let tail: Vec<f64> = radius_schedule
        .iter()
        .copied()
        .filter(|r| *r >= r_max / 10.0 * (1.0 - 1e-12))
        .collect();
    if tail.len() < 2 {
        return Err(Error::InsufficientGrid(
            "the last decade of radii needs at least two points".into(),
        ));
    }
    let mut per_ray = Vec::new();
    for (ray, unit) in ray_directions(exponent.dim(), ray_count).iter().enumerate() {
        let mut re = Vec::with_capacity(tail.len());
        for &r in &tail {
            let v = exponent.psi_along(r, unit)?.re;
            if !(v > 1e-12) {
                return Err(Error::Degenerate { ray, radius: r });
            }
            re.push(v);
        }
        per_ray.push(log_log_fit(&tail, &re)?.slope);
    }
    let value = per_ray.iter().copied().fold(f64::INFINITY, f64::min);
    let declared = exponent.asymptotics().re_inf;
    let disagreement = (value - declared).abs() > 0.05;
    Ok(BetaEstimate {
        value,
        per_ray,
        declared,
        disagreement,
        assumption1_holds: !disagreement && declared > 0.0 && declared < 2.0,
    })
}

fn origin_integral<F: Fn(num_complex::Complex64) -> f64>(
    exponent: &CharacteristicExponent,
    kappa0: f64,
    lower: f64,
    g: F,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    let scales = &exponent.asymptotics().scales;
    let mut value = 0.0;
    let mut error = 0.0;
    for d in angular_design(exponent.dim(), exponent.is_isotropic()) {
        let f = |r: f64| match exponent.psi_along(r, &d.unit) {
            Ok(p) => g(p) * r.powf(-1.0 - kappa0),
            Err(_) => f64::NAN,
        };
        let e = if lower == 0.0 {
            integrate_radial_to(f, 1.0, scales, cfg)?
        } else {
            crate::quadrature::integrate(
                |u: f64| {
                    let r = u.exp();
                    f(r) * r
                },
                lower.ln(),
                0.0,
                cfg,
            )?
        };
        if !e.value.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                lower,
                upper: 1.0,
                error: f64::NAN,
                tolerance: cfg.abs_tol,
            });
        }
        value += d.weight * e.value;
        error += d.weight * e.error;
    }
    Ok((value, error))
}

/// Decides `∫_{‖ξ‖≤1}|Ψ(ξ)|/‖ξ‖^{n+κ₀}dξ < ∞` from the declared near-zero
/// exponent and evaluates the integral when finite.
pub fn check_assumption2(exponent: &CharacteristicExponent, kappa0: f64) -> Result<Assumption2Report> {
    if !(kappa0 > 0.0 && kappa0 < 1.0) {
        return Err(invalid("kappa0", "must lie in (0, 1)"));
    }
    let finite = exponent.asymptotics().abs_zero > kappa0;
    if !finite {
        return Ok(Assumption2Report {
            kappa0,
            finite,
            value: f64::INFINITY,
            error: 0.0,
            refinements: vec![],
        });
    }
    let cfg = *exponent.quadrature();
    let (value, error) = origin_integral(exponent, kappa0, 0.0, |p| p.norm(), &cfg)?;
    let mut refinements = Vec::new();
    for eps in [1e-2, 1e-4, 1e-6] {
        let (v, _) = origin_integral(exponent, kappa0, eps, |p| p.norm(), &cfg)?;
        refinements.push((eps, v));
    }
    Ok(Assumption2Report {
        kappa0,
        finite,
        value,
        error,
        refinements,
    })
}

/// Both assumptions for one exponent; `allow_limit` accepts `β_∞ = 2`.
pub fn assess(exponent: &CharacteristicExponent, kappa0: f64, allow_limit: bool) -> Result<AssumptionReport> {
    let radii = crate::stats::logspace(1.0, 1e4, 25);
    let beta = estimate_beta_inf(exponent, 16, &radii)?;
    let assumption2 = check_assumption2(exponent, kappa0)?;
    let limiting_case = allow_limit && !beta.disagreement && beta.declared == 2.0;
    Ok(AssumptionReport {
        beta_inf: beta.value,
        kappa0,
        assumption1_holds: beta.assumption1_holds || limiting_case,
        assumption2_holds: assumption2.finite,
        limiting_case,
        beta,
        assumption2,
    })
}

pub fn verify_moment_equivalence(exponent: &CharacteristicExponent, kappa0: f64) -> Result<MomentEquivalence> {
    if !(kappa0 > 0.0 && kappa0 < 1.0) {
        return Err(invalid("kappa0", "must lie in (0, 1)"));
    }
    let triplet = exponent.triplet()?;
    let cfg = *exponent.quadrature();
    let a = exponent.asymptotics();
    let finite = [
        kappa0 < exponent.moment_boundary(),
        triplet.large_jump_moment_finite(kappa0),
        a.re_zero > kappa0,
        a.abs_zero > kappa0,
    ];
    let s1 = if finite[0] {
        crate::moments::fourier_moment(exponent, 1.0, kappa0)?.value
    } else {
        f64::INFINITY
    };
    let s2 = triplet.large_jump_moment(kappa0, &cfg)?;
    let s3 = if finite[2] {
        origin_integral(exponent, kappa0, 0.0, |p| p.re, &cfg)?.0
    } else {
        f64::INFINITY
    };
    let s4 = check_assumption2(exponent, kappa0)?.value;
    let agree = finite.iter().all(|f| *f == finite[0]);
    Ok(MomentEquivalence {
        kappa0,
        finite,
        values: [s1, s2, s3, s4],
        agree,
    })
}
