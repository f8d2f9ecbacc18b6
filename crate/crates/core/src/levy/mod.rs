//! Characteristic exponents `Ψ` with `E e^{i⟨ξ,X_t⟩} = e^{-tΨ(ξ)}`.
//!
//! An exponent is either a closed-form catalog entry (Brownian, isotropic
//! α-stable, Cauchy, relativistic tempered stable, compound Poisson) or is
//! evaluated from a Lévy triplet `(a, Σ, ν)` through the Lévy–Khintchine
//! formula
//!
//! ```text
//! Ψ(ξ) = i⟨a,ξ⟩ + ½⟨ξ,Σξ⟩ + ∫(1 - e^{i⟨ξ,x⟩} + i⟨ξ,x⟩1{‖x‖≤1}) ν(dx).
//! ```
//!
//! Every exponent carries an [`Asymptotics`] envelope: power-law exponents of
//! `Re Ψ` and `|Ψ|` at the origin and at infinity. Finiteness of improper
//! integrals elsewhere in the crate is decided from these exponents; quadrature
//! only evaluates integrals already known to be finite.

mod assumptions;
mod triplet;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{gauss_legendre, QuadConfig};

pub use assumptions::{
    assess, check_assumption2, estimate_beta_inf, verify_moment_equivalence, Assumption2Report,
    AssumptionReport, BetaEstimate, MomentEquivalence,
};
pub use triplet::{sphere_area, stable_levy_constant, Atom, LevyMeasure, LevyTriplet};
pub(crate) use triplet::norm;

/// Declared power-law envelope of an exponent.
///
/// `Re Ψ(ξ) ≍ ‖ξ‖^re_zero` and `|Ψ(ξ)| ≍ ‖ξ‖^abs_zero` as `ξ → 0`;
/// `Re Ψ(ξ) ≥ lower_constant·‖ξ‖^re_inf` for `‖ξ‖ ≥ split_radius` and
/// `|Ψ(ξ)| ≍ ‖ξ‖^abs_inf` at infinity; `|Ψ(ξ)| ≤ growth_constant·(1+‖ξ‖²)`.
/// `re_inf = 0` means `Re Ψ` stays bounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Asymptotics {
    pub re_zero: f64,
    pub abs_zero: f64,
    pub re_inf: f64,
    pub abs_inf: f64,
    pub split_radius: f64,
    pub lower_constant: f64,
    pub growth_constant: f64,
    /// Radii where the exponent changes regime (quadrature breakpoints).
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExponentKind {
    Brownian { scale: f64 },
    Stable { alpha: f64, scale: f64 },
    TemperedStable { alpha: f64, lambda: f64, scale: f64 },
    CompoundPoisson { triplet: LevyTriplet },
    Triplet(LevyTriplet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicExponent {
    dim: usize,
    kind: ExponentKind,
    name: &'static str,
    asymptotics: Asymptotics,
    nondegenerate: bool,
    quad: QuadConfig,
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(invalid("dimension", format!("supported dimensions are 1, 2, 3; got {n}")))
    }
}

impl CharacteristicExponent {
    /// `Ψ(ξ) = scale·‖ξ‖²`, i.e. `Σ = 2·scale·I`.
    pub fn brownian(n: usize) -> Result<Self> {
        Self::brownian_scaled(n, 1.0)
    }

    pub fn brownian_scaled(n: usize, scale: f64) -> Result<Self> {
        check_dim(n)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", "must be positive"));
        }
        Ok(Self {
            dim: n,
            kind: ExponentKind::Brownian { scale },
            name: "brownian",
            asymptotics: Asymptotics {
                re_zero: 2.0,
                abs_zero: 2.0,
                re_inf: 2.0,
                abs_inf: 2.0,
                split_radius: 1.0,
                lower_constant: scale,
                growth_constant: scale,
                scales: vec![1.0],
            },
            nondegenerate: true,
            quad: QuadConfig::default(),
        })
    }

    /// Isotropic stable: `Ψ(ξ) = scale·‖ξ‖^α`, `0 < α < 2`.
    pub fn stable(n: usize, alpha: f64) -> Result<Self> {
        Self::stable_scaled(n, alpha, 1.0)
    }

    pub fn stable_scaled(n: usize, alpha: f64, scale: f64) -> Result<Self> {
        check_dim(n)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(invalid("alpha", "stable index must lie in (0, 2)"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", "must be positive"));
        }
        Ok(Self {
            dim: n,
            kind: ExponentKind::Stable { alpha, scale },
            name: if alpha == 1.0 { "cauchy" } else { "stable" },
            asymptotics: Asymptotics {
                re_zero: alpha,
                abs_zero: alpha,
                re_inf: alpha,
                abs_inf: alpha,
                split_radius: 1.0,
                lower_constant: scale,
                growth_constant: scale,
                scales: vec![1.0],
            },
            nondegenerate: true,
            quad: QuadConfig::default(),
        })
    }

    pub fn cauchy(n: usize) -> Result<Self> {
        Self::stable(n, 1.0)
    }

    /// `Ψ(ξ) = scale·((λ² + ‖ξ‖²)^{α/2} - λ^α)`.
    pub fn tempered_stable(n: usize, alpha: f64, lambda: f64) -> Result<Self> {
        Self::tempered_stable_scaled(n, alpha, lambda, 1.0)
    }

    pub fn tempered_stable_scaled(n: usize, alpha: f64, lambda: f64, scale: f64) -> Result<Self> {
        check_dim(n)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(invalid("alpha", "tempered index must lie in (0, 2)"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "tempering must be positive"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", "must be positive"));
        }
        Ok(Self {
            dim: n,
            kind: ExponentKind::TemperedStable {
                alpha,
                lambda,
                scale,
            },
            name: "tempered_stable",
            asymptotics: Asymptotics {
                re_zero: 2.0,
                abs_zero: 2.0,
                re_inf: alpha,
                abs_inf: alpha,
                split_radius: 2f64.powf(1.0 / alpha) * lambda,
                lower_constant: scale / 2.0,
                growth_constant: scale,
                scales: vec![1.0, lambda],
            },
            nondegenerate: true,
            quad: QuadConfig::default(),
        })
    }

    /// Compound Poisson process with `ν = Σ mass·δ_location`.
    pub fn compound_poisson(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        check_dim(n)?;
        if atoms.is_empty() {
            return Err(invalid("atoms", "at least one atom is required"));
        }
        let triplet = LevyTriplet::new(vec![0.0; n], vec![0.0; n * n], LevyMeasure::Atoms { atoms })?;
        let asymptotics = triplet_asymptotics(&triplet);
        Ok(Self {
            dim: n,
            kind: ExponentKind::CompoundPoisson { triplet },
            name: "compound_poisson",
            asymptotics,
            nondegenerate: false,
            quad: QuadConfig::default(),
        })
    }

    pub fn from_triplet(triplet: LevyTriplet) -> Result<Self> {
        triplet.validate()?;
        let n = triplet.dim();
        let mut asymptotics = triplet_asymptotics(&triplet);
        let mut this = Self {
            dim: n,
            kind: ExponentKind::Triplet(triplet),
            name: "custom_triplet",
            asymptotics: asymptotics.clone(),
            nondegenerate: false,
            quad: QuadConfig::default(),
        };
        if asymptotics.re_inf > 0.0 {
            let lower = this.probe_lower_constant(asymptotics.re_inf)?;
            asymptotics.lower_constant = lower;
            this.nondegenerate = lower > 0.0;
        }
        this.asymptotics = asymptotics;
        Ok(this)
    }

    pub fn with_quadrature(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ExponentKind {
        &self.kind
    }

    /// Catalog name: brownian, stable, cauchy, tempered_stable,
    /// compound_poisson or custom_triplet.
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn asymptotics(&self) -> &Asymptotics {
        &self.asymptotics
    }

    pub fn quadrature(&self) -> &QuadConfig {
        &self.quad
    }

    /// Whether `Ψ⁻¹(0) = {0}` is guaranteed.
    pub fn nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    /// Stable key identifying the exponent and its parameters.
    pub fn id(&self) -> String {
        match &self.kind {
            ExponentKind::Brownian { scale } => format!("brownian(n={},scale={scale:e})", self.dim),
            ExponentKind::Stable { alpha, scale } => {
                format!("stable(n={},alpha={alpha:e},scale={scale:e})", self.dim)
            }
            ExponentKind::TemperedStable {
                alpha,
                lambda,
                scale,
            } => format!(
                "tempered_stable(n={},alpha={alpha:e},lambda={lambda:e},scale={scale:e})",
                self.dim
            ),
            ExponentKind::CompoundPoisson { triplet } | ExponentKind::Triplet(triplet) => format!(
                "{}({})",
                self.name,
                serde_json::to_string(triplet).unwrap_or_default()
            ),
        }
    }

    pub fn is_isotropic(&self) -> bool {
        match &self.kind {
            ExponentKind::Brownian { .. }
            | ExponentKind::Stable { .. }
            | ExponentKind::TemperedStable { .. } => true,
            ExponentKind::CompoundPoisson { .. } => false,
            ExponentKind::Triplet(t) => t.is_isotropic(),
        }
    }

    /// Symmetric unimodal laws: densities decrease in `‖x‖`.
    pub fn is_symmetric_unimodal(&self) -> bool {
        match &self.kind {
            ExponentKind::Brownian { .. }
            | ExponentKind::Stable { .. }
            | ExponentKind::TemperedStable { .. } => true,
            ExponentKind::CompoundPoisson { .. } => false,
            ExponentKind::Triplet(t) => {
                t.is_isotropic() && !matches!(t.measure, LevyMeasure::PowerLaw { r_min, .. } if r_min > 0.0)
            }
        }
    }

    /// Supremum of moment orders `κ` with `E‖X_t‖^κ < ∞`.
    pub fn moment_boundary(&self) -> f64 {
        match &self.kind {
            ExponentKind::Stable { alpha, .. } => *alpha,
            ExponentKind::Triplet(t) => match t.measure {
                LevyMeasure::PowerLaw { alpha, r_max, .. } if r_max.is_infinite() => alpha,
                _ => f64::INFINITY,
            },
            _ => f64::INFINITY,
        }
    }

    /// Lévy triplet of the exponent.
    pub fn triplet(&self) -> Result<LevyTriplet> {
        let n = self.dim;
        let mut identity = vec![0.0; n * n];
        for i in 0..n {
            identity[i * n + i] = 1.0;
        }
        match &self.kind {
            ExponentKind::Brownian { scale } => Ok(LevyTriplet {
                drift: vec![0.0; n],
                gaussian: identity.iter().map(|v| v * 2.0 * scale).collect(),
                measure: LevyMeasure::Zero,
            }),
            ExponentKind::Stable { alpha, scale } => Ok(LevyTriplet {
                drift: vec![0.0; n],
                gaussian: vec![0.0; n * n],
                measure: LevyMeasure::PowerLaw {
                    c: stable_levy_constant(n, *alpha, *scale),
                    alpha: *alpha,
                    r_min: 0.0,
                    r_max: f64::INFINITY,
                },
            }),
            ExponentKind::TemperedStable {
                alpha,
                lambda,
                scale,
            } => Ok(LevyTriplet {
                drift: vec![0.0; n],
                gaussian: vec![0.0; n * n],
                measure: LevyMeasure::TemperedSubordinated {
                    alpha: *alpha,
                    lambda: *lambda,
                    scale: *scale,
                },
            }),
            ExponentKind::CompoundPoisson { triplet } | ExponentKind::Triplet(triplet) => {
                Ok(triplet.clone())
            }
        }
    }

    /// `Ψ(ξ)`.
    pub fn psi(&self, xi: &[f64]) -> Result<Complex64> {
        Ok(self.psi_with_error(xi)?.0)
    }

    /// `Ψ(ξ)` with the absolute quadrature error of the jump part.
    pub fn psi_with_error(&self, xi: &[f64]) -> Result<(Complex64, f64)> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(invalid("xi", "frequency must be finite"));
        }
        match &self.kind {
            ExponentKind::CompoundPoisson { triplet } | ExponentKind::Triplet(triplet) => {
                triplet.psi(xi, &self.quad)
            }
            _ => Ok((self.isotropic_closed_form(norm(xi)), 0.0)),
        }
    }

    /// `Ψ(r·e₁)`; for isotropic exponents this is `Ψ` on the sphere of radius `r`.
    pub fn psi_radial(&self, r: f64) -> Result<Complex64> {
        match &self.kind {
            ExponentKind::CompoundPoisson { .. } | ExponentKind::Triplet(_) => {
                let mut xi = vec![0.0; self.dim];
                xi[0] = r;
                self.psi(&xi)
            }
            _ => Ok(self.isotropic_closed_form(r.abs())),
        }
    }

    /// `Ψ(r·u)` for a unit vector `u`.
    pub fn psi_along(&self, r: f64, unit: &[f64]) -> Result<Complex64> {
        if self.is_isotropic() {
            return self.psi_radial(r);
        }
        let xi: Vec<f64> = unit.iter().map(|u| u * r).collect();
        self.psi(&xi)
    }

    fn isotropic_closed_form(&self, r: f64) -> Complex64 {
        let v = match self.kind {
            ExponentKind::Brownian { scale } => scale * r * r,
            ExponentKind::Stable { alpha, scale } => scale * r.powf(alpha),
            ExponentKind::TemperedStable {
                alpha,
                lambda,
                scale,
            } => {
                let x = (r / lambda).powi(2);
                scale * lambda.powf(alpha) * libm::expm1(0.5 * alpha * libm::log1p(x))
            }
            _ => unreachable!("closed form requested for a triplet exponent"),
        };
        Complex64::new(v, 0.0)
    }

    /// Scale parameter for self-similar catalog entries.
    pub fn closed_form_scale(&self) -> Option<f64> {
        match self.kind {
            ExponentKind::Brownian { scale }
            | ExponentKind::Stable { scale, .. }
            | ExponentKind::TemperedStable { scale, .. } => Some(scale),
            _ => None,
        }
    }

    /// Sup of `|Ψ(ξ)|/(1+‖ξ‖²)` over the angular design and the given radii.
    pub fn growth_ratio_sup(&self, radii: &[f64]) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for d in angular_design(self.dim, self.is_isotropic()) {
            for &r in radii {
                let v = self.psi_along(r, &d.unit)?;
                sup = sup.max(v.norm() / (1.0 + r * r));
            }
        }
        Ok(sup)
    }

    fn probe_lower_constant(&self, beta: f64) -> Result<f64> {
        let m = self.asymptotics.split_radius;
        let mut lower = f64::INFINITY;
        for d in angular_design(self.dim, self.is_isotropic()) {
            for k in 0..=8 {
                let r = m * 10f64.powf(0.5 * k as f64);
                let v = self.psi_along(r, &d.unit)?.re / r.powf(beta);
                lower = lower.min(v);
            }
        }
        Ok(lower.max(0.0))
    }
}

fn triplet_asymptotics(t: &LevyTriplet) -> Asymptotics {
    let mut re_zero = f64::INFINITY;
    let mut re_inf: f64 = 0.0;
    let mut scales = vec![1.0];
    if t.has_gaussian() {
        re_zero = 2.0;
        re_inf = 2.0;
    }
    match &t.measure {
        LevyMeasure::Zero => {}
        LevyMeasure::Atoms { atoms } => {
            re_zero = re_zero.min(2.0);
            for a in atoms {
                scales.push(1.0 / norm(&a.location));
            }
        }
        LevyMeasure::PowerLaw {
            alpha,
            r_min,
            r_max,
            ..
        } => {
            re_zero = re_zero.min(if r_max.is_infinite() { alpha.min(2.0) } else { 2.0 });
            if *r_min == 0.0 {
                re_inf = re_inf.max(*alpha);
            }
            for r in [*r_min, *r_max] {
                if r > 0.0 && r.is_finite() {
                    scales.push(1.0 / r);
                }
            }
        }
        LevyMeasure::TemperedSubordinated { alpha, lambda, .. } => {
            re_zero = re_zero.min(2.0);
            re_inf = re_inf.max(*alpha);
            scales.push(*lambda);
        }
    }
    let im_zero = if norm(&t.drift_near_zero()) > 0.0 { 1.0 } else { 3.0 };
    let im_inf_linear = norm(&t.drift_at_infinity()) > 0.0;
    let abs_inf = if im_inf_linear { re_inf.max(1.0) } else { re_inf };
    let growth_constant = {
        let (inner, outer) = t.jump_masses().unwrap_or((0.0, 0.0));
        let sub = match t.measure {
            LevyMeasure::TemperedSubordinated { scale, .. } => scale,
            _ => 0.0,
        };
        norm(&t.drift) + 0.5 * t.max_gaussian_eigenvalue() + 0.5 * inner + 2.0 * outer + sub
    };
    Asymptotics {
        re_zero,
        abs_zero: re_zero.min(im_zero),
        re_inf,
        abs_inf,
        split_radius: 1.0,
        lower_constant: 0.0,
        growth_constant,
        scales,
    }
}

/// A unit direction with its quadrature weight on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub unit: Vec<f64>,
    pub weight: f64,
}

/// Fixed angular design on `S^{n-1}` whose weights sum to `|S^{n-1}|`:
/// `±1` for n = 1, a 64-point trapezoid rule for n = 2 and Gauss–Legendre in
/// `cos θ` times a 32-point azimuthal trapezoid rule for n = 3. Isotropic
/// integrands use the single direction `e₁` carrying the full area.
pub fn angular_design(n: usize, isotropic: bool) -> Vec<Direction> {
    if isotropic {
        let mut unit = vec![0.0; n];
        unit[0] = 1.0;
        return vec![Direction {
            unit,
            weight: sphere_area(n),
        }];
    }
    match n {
        1 => vec![
            Direction {
                unit: vec![1.0],
                weight: 1.0,
            },
            Direction {
                unit: vec![-1.0],
                weight: 1.0,
            },
        ],
        2 => {
            let m = 64;
            (0..m)
                .map(|k| {
                    let th = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                    Direction {
                        unit: vec![th.cos(), th.sin()],
                        weight: 2.0 * PI / m as f64,
                    }
                })
                .collect()
        }
        _ => {
            let (z, wz) = gauss_legendre(16);
            let m = 32;
            let mut out = Vec::with_capacity(16 * m);
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).sqrt();
                for k in 0..m {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                    out.push(Direction {
                        unit: vec![s * ph.cos(), s * ph.sin(), *zi],
                        weight: wi * 2.0 * PI / m as f64,
                    });
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_point_values() {
        let b = CharacteristicExponent::from_triplet(
            LevyTriplet::new(vec![0.0], vec![2.0], LevyMeasure::Zero).unwrap(),
        )
        .unwrap();
        let v = b.psi(&[3.0]).unwrap();
        assert_eq!(v, Complex64::new(9.0, 0.0));

        let d = CharacteristicExponent::from_triplet(
            LevyTriplet::new(vec![1.0], vec![0.0], LevyMeasure::Zero).unwrap(),
        )
        .unwrap();
        assert_eq!(d.psi(&[2.0]).unwrap(), Complex64::new(0.0, 2.0));
    }

    #[test]
    fn dimension_mismatch() {
        let b = CharacteristicExponent::brownian(2).unwrap();
        assert!(matches!(
            b.psi(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn design_weights_sum_to_sphere_area() {
        for n in 1..=3 {
            let s: f64 = angular_design(n, false).iter().map(|d| d.weight).sum();
            assert!((s - sphere_area(n)).abs() < 1e-12);
        }
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn tempered_small_frequency_is_accurate() {
        let t = CharacteristicExponent::tempered_stable(1, 1.5, 1.0).unwrap();
        let v = t.psi(&[1e-8]).unwrap().re;
        assert!((v - 0.75e-16).abs() < 1e-28);
    }

    #[test]
    fn triplet_envelope_of_stable_measure() {
        let s = CharacteristicExponent::stable(1, 1.5).unwrap();
        let t = CharacteristicExponent::from_triplet(s.triplet().unwrap()).unwrap();
        assert_eq!(t.asymptotics().re_inf, 1.5);
        assert_eq!(t.asymptotics().re_zero, 1.5);
        assert!((t.asymptotics().lower_constant - 1.0).abs() < 1e-5);
        assert!(t.nondegenerate());
        assert!(t.is_isotropic());
    }
}
