use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, integrate_radial, integrate_radial_from, Estimate, QuadConfig};

/// A point mass of the Lévy measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub location: Vec<f64>,
    pub mass: f64,
}

/// Lévy measure ν of a triplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum LevyMeasure {
    Zero,
    Atoms { atoms: Vec<Atom> },
    /// `c‖x‖^{-n-alpha}` on `r_min < ‖x‖ < r_max`.
    PowerLaw {
        c: f64,
        alpha: f64,
        r_min: f64,
        r_max: f64,
    },
    /// Brownian motion with `Ψ = ‖ξ‖²` subordinated by a tempered
    /// `alpha/2`-stable subordinator: `ν(dx) = ∫ π(dv) N(0, 2vI)(dx)` with
    /// `π(dv) = scale·a/Γ(1-a)·e^{-λ²v} v^{-1-a} dv`, `a = alpha/2`.
    TemperedSubordinated { alpha: f64, lambda: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyTriplet {
    pub drift: Vec<f64>,
    /// Row-major `n × n` Gaussian covariance.
    pub gaussian: Vec<f64>,
    pub measure: LevyMeasure,
}

/// Surface area of the unit sphere in ℝⁿ.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0)
}

/// Density constant `c` for which `∫(1 - cos⟨ξ,x⟩) c‖x‖^{-n-α} dx = scale·‖ξ‖^α`.
pub fn stable_levy_constant(n: usize, alpha: f64, scale: f64) -> f64 {
    let nf = n as f64;
    scale * alpha * 2f64.powf(alpha - 1.0) * libm::tgamma((nf + alpha) / 2.0)
        / (PI.powf(nf / 2.0) * libm::tgamma(1.0 - alpha / 2.0))
}

impl LevyTriplet {
    pub fn new(drift: Vec<f64>, gaussian: Vec<f64>, measure: LevyMeasure) -> Result<Self> {
        let t = Self {
            drift,
            gaussian,
            measure,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 || n > 3 {
            return Err(invalid("drift", format!("dimension must be 1, 2 or 3, got {n}")));
        }
        if self.gaussian.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: self.gaussian.len(),
            });
        }
        if self.drift.iter().chain(&self.gaussian).any(|v| !v.is_finite()) {
            return Err(invalid("triplet", "drift and covariance must be finite"));
        }
        for i in 0..n {
            for j in 0..i {
                if (self.gaussian[i * n + j] - self.gaussian[j * n + i]).abs() > 1e-10 {
                    return Err(invalid("gaussian", "covariance matrix is not symmetric"));
                }
            }
        }
        if self.min_gaussian_eigenvalue() < -1e-10 {
            return Err(invalid("gaussian", "covariance matrix has a negative eigenvalue"));
        }
        match &self.measure {
            LevyMeasure::Zero => {}
            LevyMeasure::Atoms { atoms } => {
                for a in atoms {
                    if a.location.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: a.location.len(),
                        });
                    }
                    if !(a.mass > 0.0 && a.mass.is_finite()) {
                        return Err(invalid("mass", "atom masses must be positive"));
                    }
                    if norm(&a.location) == 0.0 {
                        return Err(invalid("location", "the Lévy measure has no mass at the origin"));
                    }
                }
            }
            LevyMeasure::PowerLaw {
                c,
                alpha,
                r_min,
                r_max,
            } => {
                if !(*c > 0.0) || !alpha.is_finite() {
                    return Err(invalid("c", "power-law density needs c > 0 and finite alpha"));
                }
                if !(*r_min >= 0.0 && r_max > r_min) {
                    return Err(invalid("r_min", "need 0 <= r_min < r_max"));
                }
                if *r_min == 0.0 && !(*alpha < 2.0) {
                    return Err(invalid("alpha", "∫(1 ∧ ‖x‖²)ν(dx) diverges at 0 unless alpha < 2"));
                }
                if r_max.is_infinite() && !(*alpha > 0.0) {
                    return Err(invalid("alpha", "∫(1 ∧ ‖x‖²)ν(dx) diverges at infinity unless alpha > 0"));
                }
            }
            LevyMeasure::TemperedSubordinated {
                alpha,
                lambda,
                scale,
            } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return Err(invalid("alpha", "tempered index must lie in (0, 2)"));
                }
                if !(*lambda > 0.0) || !(*scale > 0.0) {
                    return Err(invalid("lambda", "tempering and scale must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn min_gaussian_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let m = DMatrix::from_row_slice(n, n, &self.gaussian);
        let eig = SymmetricEigen::new(m);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_gaussian_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let m = DMatrix::from_row_slice(n, n, &self.gaussian);
        let eig = SymmetricEigen::new(m);
        eig.eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    pub fn has_gaussian(&self) -> bool {
        self.gaussian.iter().any(|v| *v != 0.0)
    }

    /// Linear coefficient of `Im Ψ` near the origin.
    pub fn drift_near_zero(&self) -> Vec<f64> {
        let mut b = self.drift.clone();
        if let LevyMeasure::Atoms { atoms } = &self.measure {
            for a in atoms.iter().filter(|a| norm(&a.location) > 1.0) {
                for (bi, xi) in b.iter_mut().zip(&a.location) {
                    *bi -= a.mass * xi;
                }
            }
        }
        b
    }

    /// Linear coefficient of `Im Ψ` at infinity (bounded terms dropped).
    pub fn drift_at_infinity(&self) -> Vec<f64> {
        let mut b = self.drift.clone();
        if let LevyMeasure::Atoms { atoms } = &self.measure {
            for a in atoms.iter().filter(|a| norm(&a.location) <= 1.0) {
                for (bi, xi) in b.iter_mut().zip(&a.location) {
                    *bi += a.mass * xi;
                }
            }
        }
        b
    }

    pub fn is_isotropic(&self) -> bool {
        let n = self.dim();
        let s0 = self.gaussian[0];
        let gaussian_iso = (0..n).all(|i| {
            (0..n).all(|j| self.gaussian[i * n + j] == if i == j { s0 } else { 0.0 })
        });
        gaussian_iso
            && self.drift.iter().all(|v| *v == 0.0)
            && !matches!(self.measure, LevyMeasure::Atoms { .. })
    }

    /// `Ψ(ξ)` with an absolute error estimate for the jump part.
    pub fn psi(&self, xi: &[f64], cfg: &QuadConfig) -> Result<(Complex64, f64)> {
        let n = self.dim();
        if xi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: xi.len(),
            });
        }
        let drift: f64 = self.drift.iter().zip(xi).map(|(a, x)| a * x).sum();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += xi[i] * self.gaussian[i * n + j] * xi[j];
            }
        }
        let (jump, err) = self.jump_integral(xi, cfg)?;
        Ok((Complex64::new(0.5 * quad, drift) + jump, err))
    }

    /// `∫(1 - e^{i⟨ξ,x⟩} + i⟨ξ,x⟩1{‖x‖≤1}) ν(dx)`.
    pub fn jump_integral(&self, xi: &[f64], cfg: &QuadConfig) -> Result<(Complex64, f64)> {
        let n = self.dim();
        let rho = norm(xi);
        match &self.measure {
            LevyMeasure::Zero => Ok((Complex64::new(0.0, 0.0), 0.0)),
            LevyMeasure::Atoms { atoms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in atoms {
                    let y: f64 = a.location.iter().zip(xi).map(|(x, k)| x * k).sum();
                    let comp = if norm(&a.location) <= 1.0 { y } else { 0.0 };
                    acc += a.mass * Complex64::new(1.0 - y.cos(), comp - y.sin());
                }
                Ok((acc, 0.0))
            }
            LevyMeasure::PowerLaw {
                c,
                alpha,
                r_min,
                r_max,
            } => {
                if rho == 0.0 {
                    return Ok((Complex64::new(0.0, 0.0), 0.0));
                }
                let e = power_law_jump(n, *alpha, *r_min, *r_max, rho, cfg)? * (c * sphere_area(n));
                Ok((Complex64::new(e.value, 0.0), e.error))
            }
            LevyMeasure::TemperedSubordinated {
                alpha,
                lambda,
                scale,
            } => {
                if rho == 0.0 {
                    return Ok((Complex64::new(0.0, 0.0), 0.0));
                }
                let e = subordinated_jump(*alpha, *lambda, *scale, rho, cfg)?;
                Ok((Complex64::new(e.value, 0.0), e.error))
            }
        }
    }

    /// Radial density `r ↦ ν(dx)/dx` at `‖x‖ = r` for radial measures.
    pub fn radial_density(&self, r: f64, cfg: &QuadConfig) -> Result<f64> {
        let n = self.dim() as f64;
        match &self.measure {
            LevyMeasure::PowerLaw {
                c,
                alpha,
                r_min,
                r_max,
            } => Ok(if r > *r_min && r < *r_max {
                c * r.powf(-n - alpha)
            } else {
                0.0
            }),
            LevyMeasure::TemperedSubordinated {
                alpha,
                lambda,
                scale,
            } => {
                let a = alpha / 2.0;
                let k = scale * a / libm::tgamma(1.0 - a);
                let lam2 = lambda * lambda;
                let f = |v: f64| {
                    k * (-lam2 * v - r * r / (4.0 * v)).exp()
                        * v.powf(-1.0 - a)
                        * (4.0 * PI * v).powf(-n / 2.0)
                };
                Ok(integrate_radial(f, &[r * r / 4.0, 1.0 / lam2], cfg)?.value)
            }
            _ => Err(Error::Unsupported(
                "radial density is defined for absolutely continuous radial Lévy measures only".into(),
            )),
        }
    }

    /// Exponent arithmetic for `∫_{‖x‖>1} ‖x‖^κ ν(dx) < ∞`.
    pub fn large_jump_moment_finite(&self, kappa: f64) -> bool {
        match &self.measure {
            LevyMeasure::PowerLaw { alpha, r_max, .. } => r_max.is_finite() || kappa < *alpha,
            _ => true,
        }
    }

    /// `∫_{‖x‖>1} ‖x‖^κ ν(dx)`, `∞` when divergent.
    pub fn large_jump_moment(&self, kappa: f64, cfg: &QuadConfig) -> Result<f64> {
        if !self.large_jump_moment_finite(kappa) {
            return Ok(f64::INFINITY);
        }
        let n = self.dim();
        let area = sphere_area(n);
        match &self.measure {
            LevyMeasure::Zero => Ok(0.0),
            LevyMeasure::Atoms { atoms } => Ok(atoms
                .iter()
                .map(|a| {
                    let r = norm(&a.location);
                    if r > 1.0 {
                        a.mass * r.powf(kappa)
                    } else {
                        0.0
                    }
                })
                .sum()),
            LevyMeasure::PowerLaw {
                c,
                alpha,
                r_min,
                r_max,
            } => {
                let lo = r_min.max(1.0);
                if lo >= *r_max {
                    return Ok(0.0);
                }
                let p = kappa - alpha;
                let v = if p == 0.0 {
                    (r_max / lo).ln()
                } else if r_max.is_infinite() {
                    -lo.powf(p) / p
                } else {
                    (r_max.powf(p) - lo.powf(p)) / p
                };
                Ok(c * area * v)
            }
            LevyMeasure::TemperedSubordinated { lambda, .. } => {
                let f = |r: f64| -> f64 {
                    let d = self.radial_density(r, cfg).unwrap_or(f64::NAN);
                    area * r.powf(kappa + n as f64 - 1.0) * d
                };
                let e = integrate_radial_from(f, 1.0, &[1.0, 1.0 / lambda], cfg)?;
                if e.value.is_nan() {
                    return Err(Error::QuadratureNonConvergence {
                        lower: 1.0,
                        upper: f64::INFINITY,
                        error: f64::NAN,
                        tolerance: cfg.abs_tol,
                    });
                }
                Ok(e.value)
            }
        }
    }

    /// `(∫_{‖x‖≤1}‖x‖²ν(dx), ν(‖x‖>1))`, used for the growth constant.
    pub fn jump_masses(&self) -> Option<(f64, f64)> {
        let n = self.dim();
        match &self.measure {
            LevyMeasure::Zero => Some((0.0, 0.0)),
            LevyMeasure::Atoms { atoms } => {
                let mut inner = 0.0;
                let mut outer = 0.0;
                for a in atoms {
                    let r = norm(&a.location);
                    if r <= 1.0 {
                        inner += a.mass * r * r;
                    } else {
                        outer += a.mass;
                    }
                }
                Some((inner, outer))
            }
            LevyMeasure::PowerLaw {
                c,
                alpha,
                r_min,
                r_max,
            } => {
                let k = c * sphere_area(n);
                let inner = if *r_min < 1.0 {
                    power_integral(1.0 - alpha, *r_min, r_max.min(1.0))
                } else {
                    0.0
                };
                let outer = if *r_max > 1.0 {
                    power_integral(-1.0 - alpha, r_min.max(1.0), *r_max)
                } else {
                    0.0
                };
                Some((k * inner, k * outer))
            }
            LevyMeasure::TemperedSubordinated { .. } => None,
        }
    }
}

/// `∫_a^b r^p dr` (with `b` possibly infinite, assumed convergent).
fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    if p == -1.0 {
        return (b / a).ln();
    }
    let q = p + 1.0;
    let hb = if b.is_infinite() { 0.0 } else { b.powf(q) };
    let ha = if a == 0.0 { 0.0 } else { a.powf(q) };
    (hb - ha) / q
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const SMALL_JUMP_CUTOFF: f64 = 1e-8;
const OSCILLATION_SWITCH: f64 = 64.0 * PI;

/// Spherical average of `1 - cos⟨ξ,x⟩` with `‖ξ‖‖x‖ = s`.
fn one_minus_j(n: usize, s: f64) -> f64 {
    match n {
        1 => 2.0 * (0.5 * s).sin().powi(2),
        2 => {
            if s < 0.1 {
                let s2 = s * s;
                s2 / 4.0 * (1.0 - s2 / 16.0 * (1.0 - s2 / 36.0))
            } else {
                1.0 - libm::j0(s)
            }
        }
        _ => {
            if s < 0.1 {
                let s2 = s * s;
                s2 / 6.0 * (1.0 - s2 / 20.0 * (1.0 - s2 / 42.0))
            } else {
                1.0 - s.sin() / s
            }
        }
    }
}

/// `∫_X^∞ e^{is} s^{-p} ds` by the asymptotic integration-by-parts series.
fn oscillatory_tail(x: f64, p: f64) -> Complex64 {
    let step = Complex64::new(0.0, -1.0) / x;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..24 {
        let next = term * step * (p + k as f64);
        if next.norm() > term.norm() {
            break;
        }
        term = next;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    Complex64::new(0.0, 1.0) * x.powf(-p) * Complex64::from_polar(1.0, x) * sum
}

/// `∫_X^∞ j_n(s) s^{-1-α} ds` for `X ≥ OSCILLATION_SWITCH`.
fn bessel_tail(n: usize, x: f64, alpha: f64) -> f64 {
    let p = 1.0 + alpha;
    match n {
        1 => oscillatory_tail(x, p).re,
        2 => {
            let rot = Complex64::from_polar(1.0, -PI / 4.0);
            let f = |q: f64| rot * oscillatory_tail(x, q);
            let cos_part = f(p + 0.5).re - 9.0 / 128.0 * f(p + 2.5).re;
            let sin_part = 0.125 * f(p + 1.5).im - 75.0 / 1024.0 * f(p + 3.5).im;
            (2.0 / PI).sqrt() * (cos_part + sin_part)
        }
        _ => oscillatory_tail(x, p + 1.0).im,
    }
}

/// `∫_lo^hi (1 - j_n(s)) s^{-1-α} ds`.
fn scaled_jump_integral(n: usize, alpha: f64, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Estimate> {
    let mut total = Estimate::default();
    if lo < 1.0 {
        let b = hi.min(1.0);
        total = total
            + integrate(
                |u: f64| {
                    let s = u.exp();
                    one_minus_j(n, s) * s.powf(-alpha)
                },
                lo.ln(),
                b.ln(),
                cfg,
            )?;
    }
    let a = lo.max(1.0);
    let b = hi.min(OSCILLATION_SWITCH);
    if b > a {
        total = total + integrate(|s: f64| one_minus_j(n, s) * s.powf(-1.0 - alpha), a, b, cfg)?;
    }
    let a = lo.max(OSCILLATION_SWITCH);
    if hi > a {
        let power = power_integral(-1.0 - alpha, a, hi);
        let osc_hi = if hi.is_infinite() {
            0.0
        } else {
            bessel_tail(n, hi, alpha)
        };
        let osc = bessel_tail(n, a, alpha) - osc_hi;
        total.value += power - osc;
        total.error += 1e-14 * (power.abs() + osc.abs());
    }
    Ok(total)
}

/// `∫_{r_min<‖x‖<r_max}(1 - cos⟨ξ,x⟩)‖x‖^{-n-α}dx / |S^{n-1}|` at `‖ξ‖ = ρ`.
/// With `r_min = 0` the integral is cut at `ε` and `2ε` and the missing
/// `O(ε^{2-α})` piece is removed by Richardson extrapolation.
pub(crate) fn power_law_jump(
    n: usize,
    alpha: f64,
    r_min: f64,
    r_max: f64,
    rho: f64,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let hi = rho * r_max;
    let scale = rho.powf(alpha);
    if r_min > 0.0 {
        return Ok(scaled_jump_integral(n, alpha, rho * r_min, hi, cfg)? * scale);
    }
    let eps = SMALL_JUMP_CUTOFF;
    let coarse = scaled_jump_integral(n, alpha, 2.0 * rho * eps, hi, cfg)?;
    let strip = scaled_jump_integral(n, alpha, rho * eps, 2.0 * rho * eps, cfg)?;
    let gain = 2f64.powf(2.0 - alpha);
    let value = coarse.value + strip.value * gain / (gain - 1.0);
    let est = Estimate {
        value,
        error: coarse.error + strip.error * gain / (gain - 1.0) + 1e-3 * strip.value.abs(),
        evaluations: coarse.evaluations + strip.evaluations,
    };
    Ok(est * scale)
}

/// `∫ π(dv)(1 - e^{-vρ²})` for the tempered subordinator.
fn subordinated_jump(alpha: f64, lambda: f64, scale: f64, rho: f64, cfg: &QuadConfig) -> Result<Estimate> {
    let a = alpha / 2.0;
    let k = scale * a / libm::tgamma(1.0 - a);
    let cut = lambda * lambda / (rho * rho);
    let f = |w: f64| -libm::expm1(-w) * w.powf(-1.0 - a) * (-cut * w).exp();
    let e = integrate_radial(f, &[1.0, 1.0 / cut], cfg)?;
    Ok(e * (k * rho.powf(alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn stable_constant_reproduces_closed_form() {
        for n in 1..=3 {
            for &alpha in &[0.5, 1.0, 1.5, 1.9] {
                let c = stable_levy_constant(n, alpha, 1.0);
                for &rho in &[1e-3, 0.7, 3.0, 250.0, 1e4] {
                    let j = power_law_jump(n, alpha, 0.0, f64::INFINITY, rho, &cfg()).unwrap();
                    let v = j.value * c * sphere_area(n);
                    let exact = rho.powf(alpha);
                    assert!(
                        (v - exact).abs() <= 1e-6 * exact,
                        "n={n} alpha={alpha} rho={rho}: {v} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn cauchy_constant_is_one_over_pi() {
        assert!((stable_levy_constant(1, 1.0, 1.0) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn subordinated_matches_relativistic_form() {
        for &rho in &[1e-3, 0.5, 2.0, 1e3] {
            let e = subordinated_jump(1.5, 1.0, 1.0, rho, &cfg()).unwrap();
            let exact = (1.0 + rho * rho).powf(0.75) - 1.0;
            assert!((e.value - exact).abs() <= 1e-6 * exact, "{rho}: {} vs {exact}", e.value);
        }
    }

    #[test]
    fn truncated_power_law_against_direct_quadrature() {
        // finite measure on (0.5, 3): integrate 1 - cos directly
        let (alpha, lo, hi, rho) = (0.8, 0.5, 3.0, 7.0);
        let j = power_law_jump(1, alpha, lo, hi, rho, &cfg()).unwrap();
        let direct = integrate(
            |r: f64| (1.0 - (rho * r).cos()) * r.powf(-1.0 - alpha),
            lo,
            hi,
            &QuadConfig::with_tolerances(1e-13, 1e-12),
        )
        .unwrap();
        assert!((j.value - direct.value).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_covariance() {
        let t = LevyTriplet::new(vec![0.0, 0.0], vec![1.0, 2.0, 2.0, 1.0], LevyMeasure::Zero);
        assert!(t.is_err());
        let t = LevyTriplet::new(vec![0.0, 0.0], vec![1.0, 0.5, 0.4, 1.0], LevyMeasure::Zero);
        assert!(t.is_err());
    }

    #[test]
    fn single_atom_exponent() {
        let t = LevyTriplet::new(
            vec![0.0],
            vec![0.0],
            LevyMeasure::Atoms {
                atoms: vec![Atom {
                    location: vec![1.0],
                    mass: 1.0,
                }],
            },
        )
        .unwrap();
        let (v, _) = t.psi(&[PI], &cfg()).unwrap();
        assert!((v.re - 2.0).abs() < 1e-14);
        assert!((v.im - PI).abs() < 1e-14);
    }

    #[test]
    fn tail_moment_of_cauchy_measure() {
        let t = LevyTriplet::new(
            vec![0.0],
            vec![0.0],
            LevyMeasure::PowerLaw {
                c: 1.0 / PI,
                alpha: 1.0,
                r_min: 0.0,
                r_max: f64::INFINITY,
            },
        )
        .unwrap();
        let m = t.large_jump_moment(0.5, &cfg()).unwrap();
        assert!((m - 4.0 / PI).abs() < 1e-14);
    }
}
