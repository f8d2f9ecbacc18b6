use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::levy::{sphere_area, CharacteristicExponent};
use crate::quadrature::{gauss_legendre, integrate_decades, QuadConfig};

/// Frequency-tail tolerance used to choose the cutoff.
pub const CUTOFF_TOLERANCE: f64 = 1e-12;
/// Largest admissible imaginary part of an inverted real quantity.
pub const RESIDUE_TOLERANCE: f64 = 1e-8;

const CHUNK: usize = 256;

/// Regular lattice `{-L, -L+Δx, …, L}ⁿ` with `L` a multiple of `Δx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lattice {
    pub dim: usize,
    pub dx: f64,
    pub half_width: f64,
}

impl Lattice {
    pub fn new(dim: usize, dx: f64, half_width: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Unsupported(format!("density lattices exist for n = 1, 2; got {dim}")));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(invalid("dx", "must be positive"));
        }
        if !(half_width >= dx && half_width.is_finite()) {
            return Err(invalid("half_width", "must be at least dx"));
        }
        let m = (half_width / dx).round();
        Ok(Self {
            dim,
            dx,
            half_width: m * dx,
        })
    }

    /// `Δx = min(0.01, w/512)`, `L = 8w` for `n = 1`; `Δx = w/32`, `L = 4w`
    /// for `n = 2`, where `w` is the characteristic width at time `t`.
    pub fn default_for(exponent: &CharacteristicExponent, t: f64) -> Result<Self> {
        let w = characteristic_width(exponent, t)?;
        match exponent.dim() {
            1 => Self::new(1, (w / 512.0).min(0.01), 8.0 * w),
            2 => Self::new(2, w / 32.0, 4.0 * w),
            n => Err(Error::Unsupported(format!("density lattices exist for n = 1, 2; got {n}"))),
        }
    }

    /// Same spacing, half-width at least `half_width`.
    pub fn widened(&self, half_width: f64) -> Self {
        let m = (half_width / self.dx).ceil().max(self.half_steps() as f64);
        Self {
            half_width: m * self.dx,
            ..*self
        }
    }

    pub fn half_steps(&self) -> usize {
        (self.half_width / self.dx).round() as usize
    }

    pub fn points_per_axis(&self) -> usize {
        2 * self.half_steps() + 1
    }

    pub fn len(&self) -> usize {
        self.points_per_axis().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - self.half_steps() as f64) * self.dx
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.points_per_axis()).map(|j| self.coord(j)).collect()
    }

    /// Trapezoid weights along one axis (without the `Δx` factor).
    fn trapezoid_weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.points_per_axis() {
            0.5
        } else {
            1.0
        }
    }

    /// Product-trapezoid integral of lattice values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let p = self.points_per_axis();
        let s = match self.dim {
            1 => values.iter().enumerate().map(|(j, v)| self.trapezoid_weight(j) * v).sum::<f64>(),
            _ => values
                .iter()
                .enumerate()
                .map(|(idx, v)| self.trapezoid_weight(idx / p) * self.trapezoid_weight(idx % p) * v)
                .sum(),
        };
        s * self.dx.powi(self.dim as i32)
    }

    /// Trapezoid integral over the sublattice of even indices (spacing `2Δx`).
    pub fn integrate_coarse(&self, values: &[f64]) -> f64 {
        let p = self.points_per_axis();
        let coarse = Lattice {
            dx: 2.0 * self.dx,
            ..*self
        };
        let sub: Vec<f64> = match self.dim {
            1 => values.iter().step_by(2).copied().collect(),
            _ => (0..p)
                .step_by(2)
                .flat_map(|i| (0..p).step_by(2).map(move |j| i * p + j))
                .map(|idx| values[idx])
                .collect(),
        };
        coarse.integrate(&sub)
    }
}

/// `(t·s)^{1/β}` with `s` the closed-form scale or the declared lower constant.
pub fn characteristic_width(exponent: &CharacteristicExponent, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be positive"));
    }
    let a = exponent.asymptotics();
    let s = exponent.closed_form_scale().unwrap_or(a.lower_constant);
    if !(a.re_inf > 0.0) || !(s > 0.0) {
        return Err(Error::AssumptionViolated(format!(
            "{}: Re Ψ has no power-law lower bound at infinity, so e^{{-tΨ}} is not integrable",
            exponent.name()
        )));
    }
    Ok((s * t).powf(1.0 / a.re_inf))
}

/// Derivative multi-index `(α₀, α₁, …, α_n)`: `α₀` time derivatives, then
/// spatial derivatives per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Derivative(pub Vec<u32>);

impl Derivative {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    /// `k` spatial derivatives along the first axis.
    pub fn spatial(n: usize, k: u32) -> Self {
        let mut v = vec![0; n + 1];
        v[1] = k;
        Self(v)
    }

    pub fn time_order(&self) -> u32 {
        self.0[0]
    }

    pub fn spatial_order(&self) -> u32 {
        self.0[1..].iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| *a == 0)
    }
}

/// Extra Fourier multiplier applied on top of the derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum Multiplier {
    Identity,
    /// `f(x+h) - f(x)`.
    Shift(Vec<f64>),
    /// `f_{t+ε} - f_t`.
    TimeStep(f64),
}

/// `p_t` or one of its derivatives/increments sampled on a lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub t: f64,
    pub lattice: Lattice,
    pub derivative: Derivative,
    /// Row-major values (`x₁` slowest).
    pub values: Vec<f64>,
    /// Bound on the contribution of frequencies beyond the cutoff.
    pub inversion_tail_error: f64,
    /// Largest `|Im|` of the inverted values.
    pub imaginary_residue: f64,
    /// `P(X_t ∉ [-L, L]ⁿ)`; zero unless the grid holds `p_t` itself.
    pub boundary_mass: f64,
    pub cutoff: f64,
}

impl DensityGrid {
    pub fn trapezoid_mass(&self) -> f64 {
        self.lattice.integrate(&self.values)
    }

    /// `Σ values · Δxⁿ`.
    pub fn riemann_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.lattice.dx.powi(self.lattice.dim as i32)
    }

    /// For `p_t`: values ≥ `-tail_error` and Riemann mass within
    /// `[1 - 5·tail - boundary, 1 + 5·tail]`.
    pub fn satisfies_invariants(&self) -> bool {
        let tol = self.inversion_tail_error.max(1e-12);
        let mass = self.riemann_mass();
        self.values.iter().all(|v| *v >= -tol)
            && mass >= 1.0 - 5.0 * tol - self.boundary_mass - 1e-9
            && mass <= 1.0 + 5.0 * tol + 1e-9
    }

    /// Value at lattice index (per axis).
    pub fn at(&self, index: &[usize]) -> f64 {
        let p = self.lattice.points_per_axis();
        let flat = index.iter().fold(0, |acc, i| acc * p + i);
        self.values[flat]
    }

    /// Nearest lattice value to `x`.
    pub fn nearest(&self, x: &[f64]) -> f64 {
        let m = self.lattice.half_steps() as f64;
        let idx: Vec<usize> = x
            .iter()
            .map(|xi| ((xi / self.lattice.dx).round() + m).clamp(0.0, 2.0 * m) as usize)
            .collect();
        self.at(&idx)
    }

    /// CSV with header `x,p` (n = 1) or `x1,x2,p` (n = 2).
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let axis = self.lattice.axis();
        match self.lattice.dim {
            1 => {
                writeln!(w, "x,p")?;
                for (x, v) in axis.iter().zip(&self.values) {
                    writeln!(w, "{x:.16e},{v:.16e}")?;
                }
            }
            _ => {
                writeln!(w, "x1,x2,p")?;
                let p = axis.len();
                for (idx, v) in self.values.iter().enumerate() {
                    writeln!(w, "{:.16e},{:.16e},{v:.16e}", axis[idx / p], axis[idx % p])?;
                }
            }
        }
        Ok(())
    }
}

/// Frequency cutoff `Ξ ≥ M` with `e^{-tCΞ^β} Ξ^{n+d} < tol`.
pub fn frequency_cutoff(exponent: &CharacteristicExponent, t: f64, degree: f64) -> Result<f64> {
    let a = exponent.asymptotics();
    let (beta, c) = (a.re_inf, a.lower_constant);
    if !(beta > 0.0 && c > 0.0) {
        return Err(Error::AssumptionViolated(format!(
            "{}: no lower power bound for Re Ψ at infinity",
            exponent.name()
        )));
    }
    let n = exponent.dim() as f64;
    let bound = |r: f64| (-t * c * r.powf(beta)).exp() * r.powf(n + degree);
    let mut xi = a.split_radius.max(1.0);
    while bound(xi) >= CUTOFF_TOLERANCE {
        xi *= 1.02;
        if xi > 1e12 {
            return Err(Error::CutoffInsufficient(format!(
                "no cutoff below 1e12 meets the tolerance {CUTOFF_TOLERANCE:e} at t = {t}"
            )));
        }
    }
    Ok(xi)
}

fn tail_error(exponent: &CharacteristicExponent, t: f64, cutoff: f64, degree: f64, scale: f64) -> Result<f64> {
    let a = exponent.asymptotics();
    let n = exponent.dim();
    let f = |r: f64| (-t * a.lower_constant * r.powf(a.re_inf)).exp() * r.powf(n as f64 - 1.0 + degree);
    let cfg = QuadConfig::with_tolerances(1e-30, 1e-6);
    let e = integrate_decades(f, cutoff, f64::INFINITY, &cfg)?;
    Ok(scale * sphere_area(n) * e.value / (2.0 * PI).powi(n as i32))
}

/// Composite Gauss–Legendre nodes on `[0, Ξ]`: panels no wider than half a
/// period of `e^{-i x ξ}` for `|x| ≤ x_max`, with geometric refinement
/// toward `ξ = 0`.
fn half_line_nodes(cutoff: f64, x_max: f64, order: usize, levels: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let width = (PI / x_max.max(1e-300)).min(cutoff / 16.0);
    let panels = (cutoff / width).ceil().max(1.0) as usize;
    let width = cutoff / panels as f64;
    let mut edges = vec![0.0];
    for k in (0..levels).rev() {
        edges.push(width * 0.5f64.powi(k as i32 + 1));
    }
    for p in 1..=panels {
        edges.push(width * p as f64);
    }
    let mut nodes = Vec::with_capacity(edges.len() * order);
    let mut weights = Vec::with_capacity(edges.len() * order);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, wt) in gx.iter().zip(&gw) {
            nodes.push(mid + half * x);
            weights.push(half * wt);
        }
    }
    (nodes, weights)
}

fn multiplier_1d(derivative: &Derivative, extra: &Multiplier, xi: f64, psi: Complex64) -> Complex64 {
    let mut m = (-psi).powu(derivative.0[0]) * Complex64::new(0.0, -xi).powu(derivative.0[1]);
    match extra {
        Multiplier::Identity => {}
        Multiplier::Shift(h) => m *= Complex64::from_polar(1.0, -h[0] * xi) - 1.0,
        Multiplier::TimeStep(eps) => m *= (-*eps * psi).exp() - 1.0,
    }
    m
}

fn multiplier_nd(derivative: &Derivative, extra: &Multiplier, xi: &[f64], psi: Complex64) -> Complex64 {
    let mut m = (-psi).powu(derivative.0[0]);
    for (x, a) in xi.iter().zip(&derivative.0[1..]) {
        m *= Complex64::new(0.0, -x).powu(*a);
    }
    match extra {
        Multiplier::Identity => {}
        Multiplier::Shift(h) => {
            let dot: f64 = h.iter().zip(xi).map(|(a, b)| a * b).sum();
            m *= Complex64::from_polar(1.0, -dot) - 1.0;
        }
        Multiplier::TimeStep(eps) => m *= (-*eps * psi).exp() - 1.0,
    }
    m
}

/// Degree of polynomial growth a derivative/multiplier adds to `e^{-tΨ}`.
fn multiplier_degree(exponent: &CharacteristicExponent, derivative: &Derivative) -> f64 {
    let a = exponent.asymptotics();
    derivative.spatial_order() as f64 + derivative.time_order() as f64 * a.abs_inf.max(a.re_inf)
}

fn multiplier_scale(exponent: &CharacteristicExponent, derivative: &Derivative, extra: &Multiplier) -> f64 {
    let g = exponent.asymptotics().growth_constant.max(1.0);
    let base = (2.0 * g).powi(derivative.time_order() as i32);
    match extra {
        Multiplier::Identity => base,
        _ => 2.0 * base,
    }
}

fn residue_check(residue: f64) -> Result<()> {
    if residue < RESIDUE_TOLERANCE {
        Ok(())
    } else {
        Err(Error::ImaginaryResidue {
            residue,
            tolerance: RESIDUE_TOLERANCE,
        })
    }
}

/// `e^{-tΨ}` at the quadrature nodes of `[0, Ξ]` and their mirror images.
pub(crate) struct Spectrum1 {
    pub t: f64,
    pub cutoff: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    psi_pos: Vec<Complex64>,
    psi_neg: Vec<Complex64>,
}

impl Spectrum1 {
    pub fn new(exponent: &CharacteristicExponent, t: f64, cutoff: f64, x_max: f64) -> Result<Self> {
        let (nodes, weights) = half_line_nodes(cutoff, x_max, 16, 40);
        let pairs: Result<Vec<(Complex64, Complex64)>> = nodes
            .par_iter()
            .map(|&x| Ok((exponent.psi(&[x])?, exponent.psi(&[-x])?)))
            .collect();
        let (psi_pos, psi_neg) = pairs?.into_iter().unzip();
        Ok(Self {
            t,
            cutoff,
            nodes,
            weights,
            psi_pos,
            psi_neg,
        })
    }

    /// Real part of `(2π)^{-1}∫ e^{-tΨ(ξ)} m(ξ) e^{-ixξ} dξ` on the lattice,
    /// with the largest imaginary part.
    pub fn transform(&self, lattice: &Lattice, derivative: &Derivative, extra: &Multiplier) -> (Vec<f64>, f64) {
        let mut a = Vec::with_capacity(self.nodes.len());
        let mut b = Vec::with_capacity(self.nodes.len());
        for k in 0..self.nodes.len() {
            let (x, w) = (self.nodes[k], self.weights[k]);
            let (pp, pn) = (self.psi_pos[k], self.psi_neg[k]);
            a.push(w * (-self.t * pp).exp() * multiplier_1d(derivative, extra, x, pp));
            b.push(w * (-self.t * pn).exp() * multiplier_1d(derivative, extra, -x, pn));
        }
        let p = lattice.points_per_axis();
        let chunks: Vec<(Vec<f64>, f64)> = (0..p.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let j0 = c * CHUNK;
                let len = CHUNK.min(p - j0);
                let x0 = lattice.coord(j0);
                let mut acc = vec![Complex64::new(0.0, 0.0); len];
                for k in 0..self.nodes.len() {
                    let step = Complex64::from_polar(1.0, -lattice.dx * self.nodes[k]);
                    let mut e = Complex64::from_polar(1.0, -x0 * self.nodes[k]);
                    for v in acc.iter_mut() {
                        *v += a[k] * e + b[k] * e.conj();
                        e *= step;
                    }
                }
                let res = acc.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / (2.0 * PI);
                (acc.iter().map(|v| v.re / (2.0 * PI)).collect(), res)
            })
            .collect();
        let residue = chunks.iter().map(|c| c.1).fold(0.0, f64::max);
        (chunks.into_iter().flat_map(|c| c.0).collect(), residue)
    }

    /// `P(a < X_{t+s} ≤ b)` from `(2π)^{-1}∫ φ(ξ)(e^{-iaξ} - e^{-ibξ})/(iξ) dξ`.
    pub fn interval_probability(&self, a: f64, b: f64, s: f64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.nodes.len() {
            let x = self.nodes[k];
            let kern = |xi: f64| {
                (Complex64::from_polar(1.0, -a * xi) - Complex64::from_polar(1.0, -b * xi))
                    / Complex64::new(0.0, xi)
            };
            let fp = (-(self.t + s) * self.psi_pos[k]).exp() * kern(x);
            let fneg = (-(self.t + s) * self.psi_neg[k]).exp() * kern(-x);
            acc += self.weights[k] * (fp + fneg);
        }
        acc.re / (2.0 * PI)
    }

    /// `P(‖X_{t+s}‖_∞ > L)`.
    pub fn outside_mass(&self, half_width: f64, s: f64) -> f64 {
        1.0 - self.interval_probability(-half_width, half_width, s)
    }
}

/// Full-line nodes for the separable two-dimensional transform.
pub(crate) struct Spectrum2 {
    pub t: f64,
    pub cutoff: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `Ψ(s_i, s_j)`, row-major.
    psi: Vec<Complex64>,
}

impl Spectrum2 {
    pub fn new(exponent: &CharacteristicExponent, t: f64, cutoff: f64, x_max: f64) -> Result<Self> {
        let (hn, hw) = half_line_nodes(cutoff, x_max, 8, 6);
        let mut nodes: Vec<f64> = hn.iter().rev().map(|x| -x).collect();
        nodes.extend_from_slice(&hn);
        let mut weights: Vec<f64> = hw.iter().rev().copied().collect();
        weights.extend_from_slice(&hw);
        let q = nodes.len();
        let psi: Result<Vec<Complex64>> = (0..q * q)
            .into_par_iter()
            .map(|idx| exponent.psi(&[nodes[idx / q], nodes[idx % q]]))
            .collect();
        Ok(Self {
            t,
            cutoff,
            nodes,
            weights,
            psi: psi?,
        })
    }

    pub fn transform(&self, lattice: &Lattice, derivative: &Derivative, extra: &Multiplier) -> (Vec<f64>, f64) {
        let q = self.nodes.len();
        let p = lattice.points_per_axis();
        let f: Vec<Complex64> = (0..q * q)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / q, idx % q);
                let xi = [self.nodes[i], self.nodes[j]];
                let psi = self.psi[idx];
                self.weights[i] * self.weights[j] * (-self.t * psi).exp() * multiplier_nd(derivative, extra, &xi, psi)
            })
            .collect();
        let phase: Vec<Complex64> = (0..p * q)
            .map(|idx| Complex64::from_polar(1.0, -lattice.coord(idx / q) * self.nodes[idx % q]))
            .collect();
        // stage 1: g[i][j2] = Σ_k f[i][k] e^{-i x_{j2} s_k}
        let g: Vec<Complex64> = (0..q)
            .into_par_iter()
            .flat_map_iter(|i| {
                let row = &f[i * q..(i + 1) * q];
                let phase = &phase;
                (0..p).map(move |j2| {
                    let e = &phase[j2 * q..(j2 + 1) * q];
                    row.iter().zip(e).map(|(a, b)| a * b).sum::<Complex64>()
                })
            })
            .collect();
        // stage 2: v[j1][j2] = Σ_i g[i][j2] e^{-i x_{j1} s_i}
        let rows: Vec<(Vec<f64>, f64)> = (0..p)
            .into_par_iter()
            .map(|j1| {
                let e = &phase[j1 * q..(j1 + 1) * q];
                let mut acc = vec![Complex64::new(0.0, 0.0); p];
                for (i, ei) in e.iter().enumerate() {
                    let gi = &g[i * p..(i + 1) * p];
                    for (a, gv) in acc.iter_mut().zip(gi) {
                        *a += gv * ei;
                    }
                }
                let norm = 4.0 * PI * PI;
                let res = acc.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / norm;
                (acc.iter().map(|v| v.re / norm).collect(), res)
            })
            .collect();
        let residue = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        (rows.into_iter().flat_map(|r| r.0).collect(), residue)
    }

    /// `P(X_{t+s} ∉ [-L, L]²)`.
    pub fn outside_mass(&self, half_width: f64, s: f64) -> f64 {
        let q = self.nodes.len();
        let sinc: Vec<f64> = self
            .nodes
            .iter()
            .map(|x| 2.0 * (half_width * x).sin() / x)
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..q {
            for j in 0..q {
                let w = self.weights[i] * self.weights[j] * sinc[i] * sinc[j];
                acc += w * (-(self.t + s) * self.psi[i * q + j]).exp();
            }
        }
        1.0 - acc.re / (4.0 * PI * PI)
    }
}

pub(crate) enum Spectrum {
    One(Spectrum1),
    Two(Spectrum2),
}

impl Spectrum {
    /// Nodes for inverting at time `t` (and `t + s` for `s ≥ 0`) on lattices
    /// reaching `x_max`.
    pub fn new(exponent: &CharacteristicExponent, t: f64, degree: f64, x_max: f64) -> Result<Self> {
        let cutoff = frequency_cutoff(exponent, t, degree)?;
        match exponent.dim() {
            1 => Ok(Self::One(Spectrum1::new(exponent, t, cutoff, x_max)?)),
            2 => Ok(Self::Two(Spectrum2::new(exponent, t, cutoff, x_max)?)),
            n => Err(Error::Unsupported(format!("density inversion exists for n = 1, 2; got {n}"))),
        }
    }

    pub fn cutoff(&self) -> f64 {
        match self {
            Self::One(s) => s.cutoff,
            Self::Two(s) => s.cutoff,
        }
    }

    pub fn transform(&self, lattice: &Lattice, derivative: &Derivative, extra: &Multiplier) -> (Vec<f64>, f64) {
        match self {
            Self::One(s) => s.transform(lattice, derivative, extra),
            Self::Two(s) => s.transform(lattice, derivative, extra),
        }
    }

    pub fn outside_mass(&self, half_width: f64, s: f64) -> f64 {
        match self {
            Self::One(sp) => sp.outside_mass(half_width, s),
            Self::Two(sp) => sp.outside_mass(half_width, s),
        }
    }
}

fn check_width(exponent: &CharacteristicExponent, t: f64, lattice: &Lattice) -> Result<()> {
    let w = characteristic_width(exponent, t)?;
    if w < 3.0 * lattice.dx {
        return Err(Error::GridTooCoarse(format!(
            "density width {w:.3e} at t = {t} is below 3·dx = {:.3e}",
            3.0 * lattice.dx
        )));
    }
    Ok(())
}

pub(crate) fn invert_on(
    exponent: &CharacteristicExponent,
    spectrum: &Spectrum,
    t: f64,
    lattice: &Lattice,
    derivative: &Derivative,
    extra: &Multiplier,
) -> Result<DensityGrid> {
    let (values, residue) = spectrum.transform(lattice, derivative, extra);
    residue_check(residue)?;
    let degree = multiplier_degree(exponent, derivative);
    let scale = multiplier_scale(exponent, derivative, extra);
    let inversion_tail_error = tail_error(exponent, t, spectrum.cutoff(), degree, scale)?;
    let boundary_mass = if derivative.is_zero() && *extra == Multiplier::Identity {
        spectrum.outside_mass(lattice.half_width, 0.0).max(0.0)
    } else {
        0.0
    };
    Ok(DensityGrid {
        t,
        lattice: *lattice,
        derivative: derivative.clone(),
        values,
        inversion_tail_error,
        imaginary_residue: residue,
        boundary_mass,
        cutoff: spectrum.cutoff(),
    })
}

fn check_inputs(exponent: &CharacteristicExponent, t: f64, lattice: &Lattice, derivative: &Derivative) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be positive"));
    }
    if lattice.dim != exponent.dim() {
        return Err(Error::DimensionMismatch {
            expected: exponent.dim(),
            got: lattice.dim,
        });
    }
    if derivative.0.len() != exponent.dim() + 1 {
        return Err(Error::DimensionMismatch {
            expected: exponent.dim() + 1,
            got: derivative.0.len(),
        });
    }
    check_width(exponent, t, lattice)
}

/// `∂^α p_t` on the lattice by direct Fourier inversion.
pub fn invert_density(
    exponent: &CharacteristicExponent,
    t: f64,
    lattice: &Lattice,
    derivative: &Derivative,
) -> Result<DensityGrid> {
    invert_with(exponent, t, lattice, derivative, &Multiplier::Identity)
}

/// As [`invert_density`], with an increment multiplier.
pub fn invert_with(
    exponent: &CharacteristicExponent,
    t: f64,
    lattice: &Lattice,
    derivative: &Derivative,
    extra: &Multiplier,
) -> Result<DensityGrid> {
    check_inputs(exponent, t, lattice, derivative)?;
    let shift = match extra {
        Multiplier::Shift(h) => {
            if h.len() != exponent.dim() {
                return Err(Error::DimensionMismatch {
                    expected: exponent.dim(),
                    got: h.len(),
                });
            }
            h.iter().map(|v| v.abs()).fold(0.0, f64::max)
        }
        Multiplier::TimeStep(eps) if !(*eps >= 0.0 && eps.is_finite()) => {
            return Err(invalid("eps", "must be finite and non-negative"));
        }
        _ => 0.0,
    };
    let degree = multiplier_degree(exponent, derivative);
    let spectrum = Spectrum::new(exponent, t, degree, lattice.half_width + shift)?;
    invert_on(exponent, &spectrum, t, lattice, derivative, extra)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_and_cauchy_at_origin() {
        let b = CharacteristicExponent::brownian(1).unwrap();
        let lat = Lattice::default_for(&b, 1.0).unwrap();
        let g = invert_density(&b, 1.0, &lat, &Derivative::zero(1)).unwrap();
        assert!((g.nearest(&[0.0]) - 0.28209479177387814).abs() < 1e-9);
        let c = CharacteristicExponent::cauchy(1).unwrap();
        let lat = Lattice::default_for(&c, 1.0).unwrap();
        let g = invert_density(&c, 1.0, &lat, &Derivative::zero(1)).unwrap();
        assert!((g.nearest(&[0.0]) - 1.0 / PI).abs() < 1e-9);
        assert!((g.nearest(&[2.0]) - 1.0 / (PI * 5.0)).abs() < 1e-9);
        assert!(g.satisfies_invariants());
    }

    #[test]
    fn cauchy_boundary_mass() {
        let c = CharacteristicExponent::cauchy(1).unwrap();
        let lat = Lattice::default_for(&c, 1.0).unwrap();
        let g = invert_density(&c, 1.0, &lat, &Derivative::zero(1)).unwrap();
        let exact = 1.0 - 2.0 / PI * 8f64.atan();
        assert!((g.boundary_mass - exact).abs() < 1e-9, "{}", g.boundary_mass);
        assert!((g.trapezoid_mass() + g.boundary_mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_derivative() {
        let b = CharacteristicExponent::brownian(1).unwrap();
        let lat = Lattice::default_for(&b, 1.0).unwrap();
        let g = invert_density(&b, 1.0, &lat, &Derivative::spatial(1, 1)).unwrap();
        for j in [0, 700, lat.half_steps() + 123] {
            let x = lat.coord(j);
            let exact = -x / 2.0 * (-x * x / 4.0).exp() / (4.0 * PI).sqrt();
            assert!((g.at(&[j]) - exact).abs() < 1e-9, "{} {exact}", g.at(&[j]));
        }
    }

    #[test]
    fn compound_poisson_is_rejected() {
        let cp = CharacteristicExponent::compound_poisson(
            1,
            vec![crate::levy::Atom {
                location: vec![1.0],
                mass: 1.0,
            }],
        )
        .unwrap();
        assert!(matches!(Lattice::default_for(&cp, 1.0), Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn narrow_density_needs_finer_grid() {
        let c = CharacteristicExponent::cauchy(1).unwrap();
        let lat = Lattice::new(1, 0.01, 1.0).unwrap();
        assert!(matches!(
            invert_density(&c, 0.02, &lat, &Derivative::zero(1)),
            Err(Error::GridTooCoarse(_))
        ));
    }
}
