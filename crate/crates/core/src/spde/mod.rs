//! Mild solutions of `∂u = -Ψ(D)u + b(u) + σ(u)Ḟ` on a periodic lattice.
//!
//! The semigroup acts diagonally on the dual lattice, `S_Δt = e^{-ΔtΨ(ξ_k)}`,
//! and each step is
//!
//! ```text
//! u_{i+1} = S_Δt (u_i + b(u_i)Δt + σ(u_i)ΔF_i).
//! ```
//!
//! A linear drift `b(u) = λu` is folded into the semigroup, which is then
//! `e^{-Δt(Ψ(ξ_k) - λ)}`. When `σ` is constant and `b` is zero or linear the
//! recursion is carried out entirely in Fourier space.

mod holder;
mod io;
mod scheme;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::levy::{assess, CharacteristicExponent};
use crate::noise::{compute_indices, SpectralNoiseModel};

pub use holder::{
    estimate_holder, Direction, HolderAccumulator, HolderFit, HolderOptions, HolderReport, BOOTSTRAP_RESAMPLES,
    MIN_HOLDER_REPLICAS, MIN_R_SQUARED,
};
pub use io::LVF1_MAGIC;
pub use scheme::{simulate, step_mild, FieldPath, Simulation, SimulationOutput, RESIDUE_TOLERANCE};

/// Scalar nonlinearity with a declared Lipschitz constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarMap {
    Zero,
    Constant { value: f64 },
    Linear { lambda: f64 },
    /// `clamp(intercept + slope·u, lo, hi)`.
    ClippedAffine { intercept: f64, slope: f64, lo: f64, hi: f64 },
}

impl ScalarMap {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            ScalarMap::Zero => 0.0,
            ScalarMap::Constant { value } => value,
            ScalarMap::Linear { lambda } => lambda * u,
            ScalarMap::ClippedAffine {
                intercept,
                slope,
                lo,
                hi,
            } => (intercept + slope * u).clamp(lo, hi),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match *self {
            ScalarMap::Zero | ScalarMap::Constant { .. } => 0.0,
            ScalarMap::Linear { lambda } => lambda.abs(),
            ScalarMap::ClippedAffine { slope, .. } => slope.abs(),
        }
    }

    /// Largest difference quotient on a 20001-point grid of `[-10, 10]`.
    pub fn sampled_slope(&self) -> f64 {
        let m = 20_000;
        let h = 20.0 / m as f64;
        (0..m)
            .map(|i| {
                let a = -10.0 + i as f64 * h;
                ((self.eval(a + h) - self.eval(a)) / h).abs()
            })
            .fold(0.0, f64::max)
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        let finite = match *self {
            ScalarMap::Zero => true,
            ScalarMap::Constant { value } => value.is_finite(),
            ScalarMap::Linear { lambda } => lambda.is_finite(),
            ScalarMap::ClippedAffine {
                intercept,
                slope,
                lo,
                hi,
            } => [intercept, slope, lo, hi].iter().all(|v| v.is_finite()) && lo <= hi,
        };
        if !finite {
            return Err(invalid(name, "parameters must be finite with lo <= hi"));
        }
        if self.sampled_slope() > self.lipschitz() * (1.0 + 1e-9) + 1e-9 {
            return Err(invalid(name, "declared Lipschitz constant is exceeded"));
        }
        Ok(())
    }
}

/// Initial data on the torus, functions of the first coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Constant { value: f64 },
    /// `amplitude·sin(2π·wavenumber·x/L)`.
    Sinusoid { amplitude: f64, wavenumber: u32 },
    /// `amplitude·Σ_{j<terms} 2^{-jρ} cos(2π 2^j x/L)`, Hölder of order `ρ`.
    Weierstrass { amplitude: f64, rho: f64, terms: u32 },
}

impl InitialCondition {
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            InitialCondition::Constant { value } => value,
            InitialCondition::Sinusoid {
                amplitude,
                wavenumber,
            } => amplitude * (2.0 * PI * wavenumber as f64 * x / length).sin(),
            InitialCondition::Weierstrass { amplitude, rho, terms } => {
                let mut s = 0.0;
                for j in 0..terms as i32 {
                    let f = 2f64.powi(j);
                    s += f.powf(-rho) * (2.0 * PI * f * x / length).cos();
                }
                amplitude * s
            }
        }
    }

    /// Declared Hölder order (1 for smooth data).
    pub fn rho(&self) -> f64 {
        match *self {
            InitialCondition::Weierstrass { rho, .. } => rho,
            _ => 1.0,
        }
    }

    /// `sup |u₀|`.
    pub fn bound(&self) -> f64 {
        match *self {
            InitialCondition::Constant { value } => value.abs(),
            InitialCondition::Sinusoid { amplitude, .. } => amplitude.abs(),
            InitialCondition::Weierstrass { amplitude, rho, terms } => {
                amplitude.abs() * (0..terms as i32).map(|j| 2f64.powf(-rho * j as f64)).sum::<f64>()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub exponent: CharacteristicExponent,
    pub noise: SpectralNoiseModel,
    pub b: ScalarMap,
    pub sigma: ScalarMap,
    pub u0: InitialCondition,
    /// Moment index from Assumption 2, when known.
    pub kappa0: Option<f64>,
}

impl ModelSpec {
    pub fn new(
        exponent: CharacteristicExponent,
        noise: SpectralNoiseModel,
        b: ScalarMap,
        sigma: ScalarMap,
        u0: InitialCondition,
    ) -> Result<Self> {
        let m = Self {
            exponent,
            noise,
            b,
            sigma,
            u0,
            kappa0: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Additive noise, no drift, zero initial data.
    pub fn additive(exponent: CharacteristicExponent, noise: SpectralNoiseModel) -> Result<Self> {
        Self::new(
            exponent,
            noise,
            ScalarMap::Zero,
            ScalarMap::Constant { value: 1.0 },
            InitialCondition::Constant { value: 0.0 },
        )
    }

    pub fn with_kappa0(mut self, kappa0: f64) -> Result<Self> {
        self.kappa0 = Some(kappa0);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.exponent.dim() != self.noise.dim {
            return Err(Error::DimensionMismatch {
                expected: self.exponent.dim(),
                got: self.noise.dim,
            });
        }
        self.b.validate("b")?;
        self.sigma.validate("sigma")?;
        if !self.u0.bound().is_finite() {
            return Err(invalid("u0", "initial data must be bounded"));
        }
        if let InitialCondition::Weierstrass { rho, .. } = self.u0 {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(invalid("rho", "must lie in (0, 1)"));
            }
            if let Some(k0) = self.kappa0 {
                if rho >= k0 {
                    return Err(invalid("rho", format!("must be below kappa0 = {k0}")));
                }
            }
        }
        if let Some(k0) = self.kappa0 {
            if !(k0 > 0.0 && k0 < 1.0) {
                return Err(invalid("kappa0", "must lie in (0, 1)"));
            }
        }
        Ok(())
    }
}

/// Admissible spatial and temporal exponent ranges.
///
/// `α < min{κ₀/(n+κ₀), min{ι_u, K}·β_∞/(n+1)}` with
/// `K = ((n+1)/β_∞ + κ₀/2)·κ₀/(n+κ₀)`; the temporal endpoint uses
/// `K̃ = ((n+2)/β_∞ + κ₀/2)·κ₀/(n+κ₀)` and the denominator `n+2`
/// (`beta_end_printed` keeps `n+1`). The Hölder exponents are
/// `(α∧2ρ)/2` in space and `(β∧ρ)/2` in time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeBundle {
    pub n: usize,
    pub beta_inf: f64,
    pub kappa0: f64,
    pub rho: f64,
    pub iota_u: f64,
    pub k: f64,
    pub k_tilde: f64,
    pub alpha_end: f64,
    pub beta_end: f64,
    pub beta_end_printed: f64,
    pub spatial_holder: f64,
    pub temporal_holder: f64,
    pub limiting_case: bool,
}

/// Range endpoints from `β_∞`, `κ₀`, `n`, `ι_u` and `ρ`.
pub fn range_formulas(n: usize, beta_inf: f64, kappa0: f64, iota_u: f64, rho: f64) -> Result<RangeBundle> {
    if !(iota_u > 0.0) {
        return Err(Error::NoRange("iota_u = 0: no eta makes the upper integral finite".into()));
    }
    if !(beta_inf > 0.0) {
        return Err(Error::NoRange("beta_inf = 0".into()));
    }
    if !(kappa0 > 0.0 && kappa0 < 1.0) {
        return Err(invalid("kappa0", "must lie in (0, 1)"));
    }
    if !(rho > 0.0) {
        return Err(invalid("rho", "must be positive"));
    }
    let nf = n as f64;
    let cap = kappa0 / (nf + kappa0);
    let k = ((nf + 1.0) / beta_inf + kappa0 / 2.0) * cap;
    let k_tilde = ((nf + 2.0) / beta_inf + kappa0 / 2.0) * cap;
    let alpha_end = cap.min(iota_u.min(k) * beta_inf / (nf + 1.0));
    let beta_end = cap.min(iota_u.min(k_tilde) * beta_inf / (nf + 2.0));
    let beta_end_printed = cap.min(iota_u.min(k_tilde) * beta_inf / (nf + 1.0));
    Ok(RangeBundle {
        n,
        beta_inf,
        kappa0,
        rho,
        iota_u,
        k,
        k_tilde,
        alpha_end,
        beta_end,
        beta_end_printed,
        spatial_holder: alpha_end.min(2.0 * rho) / 2.0,
        temporal_holder: beta_end.min(rho) / 2.0,
        limiting_case: false,
    })
}

/// Checks both assumptions, computes `ι_u` and evaluates the ranges.
/// `allow_limit` accepts `β_∞ = 2` as a limiting case.
pub fn paper_ranges(
    exponent: &CharacteristicExponent,
    noise: &SpectralNoiseModel,
    kappa0: f64,
    rho: f64,
    allow_limit: bool,
) -> Result<RangeBundle> {
    let a = assess(exponent, kappa0, allow_limit)?;
    if !a.assumption1_holds {
        return Err(Error::AssumptionViolated(format!(
            "{}: growth index {} at infinity",
            exponent.name(),
            a.beta_inf
        )));
    }
    if !a.assumption2_holds {
        return Err(Error::AssumptionViolated(format!(
            "{}: origin integral diverges at kappa0 = {kappa0}",
            exponent.name()
        )));
    }
    let ix = compute_indices(noise, exponent)?;
    let beta_inf = exponent.asymptotics().re_inf;
    let mut r = range_formulas(exponent.dim(), beta_inf, kappa0, ix.iota_u, rho)?;
    r.limiting_case = a.limiting_case;
    Ok(r)
}
