//! Fractional moments `E‖X_t‖^κ₀`: Monte Carlo from exact samplers, the
//! Fourier identity
//!
//! ```text
//! E‖X_t‖^κ = 𝒞(n,κ)^{-1} ∫ (1 - Re e^{-tΨ(ξ)}) ‖ξ‖^{-n-κ} dξ,
//! 𝒞(n,κ) = 2π^{n/2} Γ(1-κ/2) / (κ 2^κ Γ((n+κ)/2)),
//! ```
//!
//! and the bound `∫ (t|Ψ| ∧ 1) ‖ξ‖^{-n-κ} dξ` that controls it.

pub(crate) mod sampler;

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::levy::{angular_design, norm, CharacteristicExponent, ExponentKind, LevyMeasure};
use crate::quadrature::{integrate_radial_to, integrate_weighted_tail, Estimate, QuadConfig};
use crate::stats;

pub use sampler::{sample_increment, Sampler};

/// Draws per independent random stream.
pub const BLOCK: usize = 4096;
/// Groups used by the median-of-means estimator and for slope errors.
pub const GROUPS: usize = 32;
/// Smallest replica count accepted by the moment estimators.
pub const MIN_REPLICAS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mean,
    MedianOfMeans,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub t: f64,
    pub kappa0: f64,
    pub mc_value: f64,
    pub mc_stderr: f64,
    pub replicas: usize,
    pub integral_bound: f64,
    /// `max(1, mc_value / integral_bound)`.
    pub fitted_c: f64,
    /// Slope of `log E‖X_t‖^κ₀` against `log t` when estimated on a grid.
    pub growth_exponent_fit: Option<f64>,
    pub estimator: Estimator,
}

/// `𝒞(n, κ)` for `0 < κ < 2`.
pub fn moment_constant(n: usize, kappa: f64) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf(nf / 2.0) * libm::tgamma(1.0 - kappa / 2.0)
        / (kappa * 2f64.powf(kappa) * libm::tgamma((nf + kappa) / 2.0))
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 1.0 {
        Ok(())
    } else {
        Err(invalid("kappa0", "must lie in (0, 1)"))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", "must be finite and non-negative"))
    }
}

/// Sphere-averaged `∫_0^∞ h(Ψ(r·u)) r^{-1-κ} dr`, where `h(Ψ) → h_∞` is
/// approached once `t Re Ψ` is large or oscillates boundedly.
fn spectral_integral<H>(exponent: &CharacteristicExponent, t: f64, kappa: f64, h: H, cfg: &QuadConfig) -> Result<Estimate>
where
    H: Fn(num_complex::Complex64) -> f64 + Sync,
{
    let a = exponent.asymptotics();
    let beta = if a.re_inf > 0.0 { a.re_inf } else { 1.0 };
    let t_scale = t.powf(-1.0 / beta);
    let mut scales = a.scales.clone();
    scales.push(t_scale);
    let top = scales.iter().copied().fold(1.0f64, f64::max).max(a.split_radius);
    let upper = top * 1e2;
    let mut total = Estimate::default();
    for d in angular_design(exponent.dim(), exponent.is_isotropic()) {
        let f = |r: f64| match exponent.psi_along(r, &d.unit) {
            Ok(p) => h(p) * r.powf(-1.0 - kappa),
            Err(_) => f64::NAN,
        };
        let head = integrate_radial_to(f, upper, &scales, cfg)?;
        let g = |r: f64| match exponent.psi_along(r, &d.unit) {
            Ok(p) => h(p),
            Err(_) => f64::NAN,
        };
        let tail = integrate_weighted_tail(g, 1.0 + kappa, upper, 40, cfg)?;
        let e = head + tail;
        if !e.value.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                lower: 0.0,
                upper: f64::INFINITY,
                error: f64::NAN,
                tolerance: cfg.abs_tol,
            });
        }
        total = total + e * d.weight;
    }
    Ok(total)
}

/// Exact `E‖X_t‖^κ` for atom-only triplets by summing over Poisson counts.
fn poisson_moment(velocity: &[f64], atoms: &[(Vec<f64>, f64)], t: f64, kappa: f64) -> Result<Estimate> {
    const TAIL: f64 = 1e-17;
    const MAX_COMBOS: f64 = 1e6;
    let m = atoms.len().max(1);
    let mut pmfs: Vec<Vec<f64>> = Vec::with_capacity(atoms.len());
    let mut missing = 0.0;
    let mut combos = 1.0;
    for (_, mass) in atoms {
        let lam = mass * t;
        let mut p = (-lam).exp();
        let mut cum = p;
        let mut pmf = vec![p];
        let mut k = 0.0;
        while 1.0 - cum > TAIL / m as f64 && pmf.len() < 100_000 {
            k += 1.0;
            p *= lam / k;
            cum += p;
            pmf.push(p);
            if p == 0.0 && k > lam {
                break;
            }
        }
        missing += (1.0 - cum).max(0.0);
        combos *= pmf.len() as f64;
        pmfs.push(pmf);
    }
    if combos > MAX_COMBOS {
        return Err(Error::Unsupported(format!(
            "Poisson enumeration needs {combos:.3e} terms"
        )));
    }
    let n = velocity.len();
    let base: Vec<f64> = velocity.iter().map(|v| v * t).collect();
    let mut counts = vec![0usize; atoms.len()];
    let mut value = 0.0;
    let mut reach: f64 = norm(&base);
    loop {
        let mut x = base.clone();
        let mut prob = 1.0;
        for (i, &k) in counts.iter().enumerate() {
            prob *= pmfs[i][k];
            for j in 0..n {
                x[j] += k as f64 * atoms[i].0[j];
            }
        }
        let r = norm(&x);
        reach = reach.max(r);
        value += prob * r.powf(kappa);
        let mut i = 0;
        loop {
            if i == counts.len() {
                let error = missing * (reach + 1.0).powf(kappa) * 10.0;
                return Ok(Estimate {
                    value,
                    error,
                    evaluations: combos as usize,
                });
            }
            counts[i] += 1;
            if counts[i] < pmfs[i].len() {
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

fn atom_law(exponent: &CharacteristicExponent) -> Option<(Vec<f64>, Vec<(Vec<f64>, f64)>)> {
    let triplet = match exponent.kind() {
        ExponentKind::CompoundPoisson { triplet } | ExponentKind::Triplet(triplet) => triplet,
        _ => return None,
    };
    if triplet.has_gaussian() {
        return None;
    }
    match &triplet.measure {
        LevyMeasure::Atoms { atoms } => Some((
            sampler::atom_velocity(triplet),
            atoms.iter().map(|a| (a.location.clone(), a.mass)).collect(),
        )),
        LevyMeasure::Zero => Some((sampler::atom_velocity(triplet), vec![])),
        _ => None,
    }
}

/// `E‖X_t‖^κ` by the Fourier identity (exact Poisson sums for atom-only
/// triplets).
pub fn fourier_moment(exponent: &CharacteristicExponent, t: f64, kappa: f64) -> Result<Estimate> {
    check_t(t)?;
    if !(kappa > 0.0 && kappa < 2.0) {
        return Err(invalid("kappa", "must lie in (0, 2)"));
    }
    if kappa >= exponent.moment_boundary() {
        return Ok(Estimate {
            value: f64::INFINITY,
            ..Estimate::default()
        });
    }
    if t == 0.0 {
        return Ok(Estimate::default());
    }
    if let Some((v, atoms)) = atom_law(exponent) {
        return poisson_moment(&v, &atoms, t, kappa);
    }
    let cfg = *exponent.quadrature();
    let e = spectral_integral(exponent, t, kappa, |p| 1.0 - (-t * p).exp().re, &cfg)?;
    Ok(e * (1.0 / moment_constant(exponent.dim(), kappa)))
}

/// `∫ (t|Ψ(ξ)| ∧ 1) ‖ξ‖^{-n-κ} dξ`.
pub fn lemma23_bound(exponent: &CharacteristicExponent, t: f64, kappa: f64) -> Result<Estimate> {
    check_t(t)?;
    check_kappa(kappa)?;
    if t == 0.0 {
        return Ok(Estimate::default());
    }
    if exponent.asymptotics().abs_zero <= kappa {
        return Ok(Estimate {
            value: f64::INFINITY,
            ..Estimate::default()
        });
    }
    let base = *exponent.quadrature();
    let cfg = QuadConfig {
        rel_tol: base.rel_tol.max(1e-6),
        ..base
    };
    spectral_integral(exponent, t, kappa, |p| (t * p.norm()).min(1.0), &cfg)
}

/// Draws `replicas` copies of `X_t` in blocks of [`BLOCK`]; block `b` uses
/// `ChaCha8Rng::seed_from_u64(seed)` on stream `b`. Returns a flat
/// row-major `replicas × n` array.
pub fn sample_many(exponent: &CharacteristicExponent, t: f64, replicas: usize, seed: u64) -> Result<Vec<f64>> {
    check_t(t)?;
    let sampler = Sampler::new(exponent)?;
    let n = sampler.dim();
    let blocks = replicas.div_ceil(BLOCK);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BLOCK.min(replicas - b * BLOCK);
            let mut out = vec![0.0; count * n];
            for row in out.chunks_mut(n) {
                sampler.draw(t, &mut rng, row);
            }
            out
        })
        .collect();
    Ok(parts.concat())
}

/// `‖X_t‖^κ` for each replica.
pub fn sample_norm_powers(
    exponent: &CharacteristicExponent,
    t: f64,
    kappa: f64,
    replicas: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = exponent.dim();
    let draws = sample_many(exponent, t, replicas, seed)?;
    Ok(draws.chunks(n).map(|x| norm(x).powf(kappa)).collect())
}

fn group_means(values: &[f64]) -> Vec<f64> {
    let r = values.len();
    (0..GROUPS)
        .map(|g| stats::mean(&values[g * r / GROUPS..(g + 1) * r / GROUPS]))
        .collect()
}

/// Plain mean when `‖X‖^κ₀` has finite variance (`2κ₀` below the moment
/// boundary), otherwise median of [`GROUPS`] contiguous group means.
pub fn choose_estimator(exponent: &CharacteristicExponent, kappa0: f64) -> Estimator {
    if 2.0 * kappa0 < exponent.moment_boundary() {
        Estimator::Mean
    } else {
        Estimator::MedianOfMeans
    }
}

fn summarize(values: &[f64], estimator: Estimator) -> (f64, f64) {
    match estimator {
        Estimator::Mean => (
            stats::mean(values),
            stats::std_dev(values) / (values.len() as f64).sqrt(),
        ),
        Estimator::MedianOfMeans => {
            let g = group_means(values);
            (
                stats::median(&g),
                (PI / 2.0).sqrt() * stats::std_dev(&g) / (GROUPS as f64).sqrt(),
            )
        }
    }
}

fn check_moment_inputs(exponent: &CharacteristicExponent, kappa0: f64, replicas: usize) -> Result<()> {
    check_kappa(kappa0)?;
    if kappa0 >= exponent.moment_boundary() {
        return Err(invalid(
            "kappa0",
            format!("must be below the moment boundary {}", exponent.moment_boundary()),
        ));
    }
    if replicas < MIN_REPLICAS {
        return Err(invalid("replicas", format!("need at least {MIN_REPLICAS}")));
    }
    Ok(())
}

/// Monte Carlo `E‖X_t‖^κ₀` with its standard error and the integral bound.
pub fn estimate_fractional_moment(
    exponent: &CharacteristicExponent,
    t: f64,
    kappa0: f64,
    replicas: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    check_t(t)?;
    check_moment_inputs(exponent, kappa0, replicas)?;
    let estimator = choose_estimator(exponent, kappa0);
    if t == 0.0 {
        return Ok(MomentEstimate {
            t,
            kappa0,
            mc_value: 0.0,
            mc_stderr: 0.0,
            replicas,
            integral_bound: 0.0,
            fitted_c: 1.0,
            growth_exponent_fit: None,
            estimator,
        });
    }
    let values = sample_norm_powers(exponent, t, kappa0, replicas, seed)?;
    let (mc_value, mc_stderr) = summarize(&values, estimator);
    let integral_bound = lemma23_bound(exponent, t, kappa0)?.value;
    Ok(MomentEstimate {
        t,
        kappa0,
        mc_value,
        mc_stderr,
        replicas,
        integral_bound,
        fitted_c: (mc_value / integral_bound).max(1.0),
        growth_exponent_fit: None,
        estimator,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma23Report {
    pub kappa0: f64,
    pub estimates: Vec<MomentEstimate>,
    /// `max(1, max_t mc_value/integral_bound)`.
    pub fitted_c: f64,
    pub argmax_t: f64,
    /// Range of `mc_value/integral_bound` over the grid.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub holds: bool,
}

/// `E‖X_t‖^κ₀ ≤ C ∫(t|Ψ| ∧ 1)/‖ξ‖^{n+κ₀}` on a time grid with one `C`.
pub fn verify_lemma23(
    exponent: &CharacteristicExponent,
    kappa0: f64,
    t_grid: &[f64],
    replicas: usize,
    seed: u64,
) -> Result<Lemma23Report> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(invalid("t_grid", "need positive finite times"));
    }
    let mut estimates = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        estimates.push(estimate_fractional_moment(exponent, t, kappa0, replicas, seed)?);
    }
    let ratios: Vec<f64> = estimates.iter().map(|e| e.mc_value / e.integral_bound).collect();
    let (imax, rmax) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, (i, r)| if r > a.1 { (i, r) } else { a });
    let rmin = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let fitted_c = rmax.max(1.0);
    let holds = fitted_c.is_finite()
        && estimates
            .iter()
            .all(|e| e.mc_value - 3.0 * e.mc_stderr <= fitted_c * e.integral_bound);
    Ok(Lemma23Report {
        kappa0,
        estimates,
        fitted_c,
        argmax_t: t_grid[imax],
        ratio_min: rmin,
        ratio_max: rmax,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub kappa0: f64,
    pub kappa: f64,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub estimator: Estimator,
    /// Slope of `log E‖X_t‖^κ₀` against `log t` over the whole grid.
    pub slope: f64,
    pub slope_stderr: f64,
    /// Slope over the lowest decade of the grid.
    pub small_t_slope: f64,
    pub small_t_slope_stderr: f64,
    /// Supremum of admissible `κ` from the moment lemma, `κ₀/2`.
    pub kappa_supremum: f64,
    /// `max_t E‖X_t‖^κ₀ / t^κ`.
    pub fitted_c: f64,
    pub argmax_t: f64,
    /// Grid points where the bound fails by more than three standard errors.
    pub violations: Vec<f64>,
    pub holds: bool,
}

fn group_slope_stderr(groups: &[Vec<f64>], log_t: &[f64], estimator: Estimator) -> Result<f64> {
    let mut slopes = Vec::with_capacity(GROUPS);
    for g in 0..GROUPS {
        let y: Vec<f64> = groups.iter().map(|row| row[g].max(f64::MIN_POSITIVE).ln()).collect();
        slopes.push(stats::linear_fit(log_t, &y)?.slope);
    }
    let mut se = stats::std_dev(&slopes) / (GROUPS as f64).sqrt();
    if estimator == Estimator::MedianOfMeans {
        se *= (PI / 2.0).sqrt();
    }
    Ok(se)
}

/// Checks `E‖X_t‖^κ₀ ≤ C t^κ` on `(0, 1]`. Every time point reuses the same
/// seed, so exact scaling laws reproduce exactly.
pub fn verify_growth(
    exponent: &CharacteristicExponent,
    kappa0: f64,
    t_grid: &[f64],
    kappa: f64,
    replicas: usize,
    seed: u64,
) -> Result<GrowthReport> {
    check_moment_inputs(exponent, kappa0, replicas)?;
    if !(kappa > 0.0 && kappa < kappa0 / 2.0) {
        return Err(invalid("kappa", "must lie in (0, kappa0/2)"));
    }
    if t_grid.len() < 2 {
        return Err(Error::InsufficientGrid("growth fit needs at least two times".into()));
    }
    if t_grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("t_grid", "times must increase within (0, 1]"));
    }
    let estimator = choose_estimator(exponent, kappa0);
    let mut values = Vec::new();
    let mut stderrs = Vec::new();
    let mut groups = Vec::new();
    for &t in t_grid {
        let v = sample_norm_powers(exponent, t, kappa0, replicas, seed)?;
        let (m, se) = summarize(&v, estimator);
        values.push(m);
        stderrs.push(se);
        groups.push(group_means(&v));
    }
    let log_t: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let log_v: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let slope = stats::linear_fit(&log_t, &log_v)?.slope;
    let slope_stderr = group_slope_stderr(&groups, &log_t, estimator)?;

    let t0 = t_grid[0];
    let low: Vec<usize> = (0..t_grid.len()).filter(|&i| t_grid[i] <= t0 * 10.0 * (1.0 + 1e-12)).collect();
    let low = if low.len() >= 2 { low } else { vec![0, 1] };
    let lt: Vec<f64> = low.iter().map(|&i| log_t[i]).collect();
    let lv: Vec<f64> = low.iter().map(|&i| log_v[i]).collect();
    let lg: Vec<Vec<f64>> = low.iter().map(|&i| groups[i].clone()).collect();
    let small_t_slope = stats::linear_fit(&lt, &lv)?.slope;
    let small_t_slope_stderr = group_slope_stderr(&lg, &lt, estimator)?;

    if (small_t_slope - kappa).abs() < 3.0 * small_t_slope_stderr {
        return Err(Error::InsufficientReplicas(format!(
            "small-time slope {small_t_slope:.4} is within 3 standard errors ({small_t_slope_stderr:.2e}) of kappa = {kappa}"
        )));
    }
    let (imax, fitted_c) = values
        .iter()
        .zip(t_grid)
        .map(|(v, t)| v / t.powf(kappa))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, (i, r)| if r > a.1 { (i, r) } else { a });
    let violations: Vec<f64> = t_grid
        .iter()
        .zip(values.iter().zip(&stderrs))
        .filter(|(t, (v, se))| *v - 3.0 * *se > fitted_c * t.powf(kappa))
        .map(|(t, _)| *t)
        .collect();
    let holds = fitted_c.is_finite() && violations.is_empty() && small_t_slope >= kappa;
    Ok(GrowthReport {
        kappa0,
        kappa,
        t_grid: t_grid.to_vec(),
        values,
        stderrs,
        estimator,
        slope,
        slope_stderr,
        small_t_slope,
        small_t_slope_stderr,
        kappa_supremum: kappa0 / 2.0,
        fitted_c,
        argmax_t: t_grid[imax],
        violations,
        holds,
    })
}
