use serde::Serialize;

use super::inversion::{
    invert_on, Derivative, Lattice, Multiplier, Spectrum, Spectrum1,
};
use crate::error::{invalid, Error, Result};
use crate::levy::{norm, CharacteristicExponent};
use crate::moments::fourier_moment;
use crate::stats::{log_log_fit, LinearFit};

/// Largest change of a lattice L¹ sum under halving of the resolution.
pub const REFINEMENT_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupIncrement {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub theta: f64,
    /// `‖h‖^θ t^{-(θ+k+n)/β_∞}` (space) or `ε^θ t^{-(2θ+k+n)/β_∞}` (time).
    pub envelope: f64,
}

fn envelope_exponent(exponent: &CharacteristicExponent, derivative: &Derivative, numerator: f64) -> f64 {
    let beta = exponent.asymptotics().re_inf;
    let k = derivative.spatial_order() as f64 + beta * derivative.time_order() as f64;
    (numerator + k + exponent.dim() as f64) / beta
}

fn sup_of(grid: &super::DensityGrid) -> (f64, Vec<f64>) {
    let p = grid.lattice.points_per_axis();
    let (idx, v) = grid
        .values
        .iter()
        .map(|v| v.abs())
        .enumerate()
        .fold((0, 0.0), |a, (i, v)| if v > a.1 { (i, v) } else { a });
    let argmax = match grid.lattice.dim {
        1 => vec![grid.lattice.coord(idx)],
        _ => vec![grid.lattice.coord(idx / p), grid.lattice.coord(idx % p)],
    };
    (v, argmax)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(invalid("theta", "must lie in (0, 1]"))
    }
}

/// `sup_x |∂^α p_t(x+h) - ∂^α p_t(x)|` over the default lattice.
pub fn sup_increment_space(
    exponent: &CharacteristicExponent,
    t: f64,
    h: &[f64],
    derivative: &Derivative,
    theta: f64,
) -> Result<SupIncrement> {
    check_theta(theta)?;
    if h.len() != exponent.dim() {
        return Err(Error::DimensionMismatch {
            expected: exponent.dim(),
            got: h.len(),
        });
    }
    let hn = norm(h);
    let envelope = hn.powf(theta) * t.powf(-envelope_exponent(exponent, derivative, theta));
    if hn == 0.0 {
        return Ok(SupIncrement {
            value: 0.0,
            argmax: vec![0.0; h.len()],
            theta,
            envelope,
        });
    }
    let lattice = Lattice::default_for(exponent, t)?;
    let grid = super::invert_with(exponent, t, &lattice, derivative, &Multiplier::Shift(h.to_vec()))?;
    let (value, argmax) = sup_of(&grid);
    Ok(SupIncrement {
        value,
        argmax,
        theta,
        envelope,
    })
}

/// `sup_x |∂^α p_{t+ε}(x) - ∂^α p_t(x)|` over the default lattice.
pub fn sup_increment_time(
    exponent: &CharacteristicExponent,
    t: f64,
    eps: f64,
    derivative: &Derivative,
    theta: f64,
) -> Result<SupIncrement> {
    check_theta(theta)?;
    let envelope = eps.powf(theta) * t.powf(-envelope_exponent(exponent, derivative, 2.0 * theta));
    if eps == 0.0 {
        return Ok(SupIncrement {
            value: 0.0,
            argmax: vec![0.0; exponent.dim()],
            theta,
            envelope,
        });
    }
    let lattice = Lattice::default_for(exponent, t)?;
    let grid = super::invert_with(exponent, t, &lattice, derivative, &Multiplier::TimeStep(eps))?;
    let (value, argmax) = sup_of(&grid);
    Ok(SupIncrement {
        value,
        argmax,
        theta,
        envelope,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupEnvelopeFit {
    pub theta: f64,
    pub t_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub orders: Vec<u32>,
    /// `(k, t, h, value, envelope)` for every grid point.
    pub points: Vec<(u32, f64, f64, f64, f64)>,
    pub fitted_c: f64,
    pub argmax: (u32, f64, f64),
    pub holds: bool,
}

/// One constant `C` with `sup|Δ_h ∂^k p_t| ≤ C ‖h‖^θ t^{-(θ+k+n)/β_∞}` over
/// the grid; `h` runs along the first axis.
pub fn fit_sup_envelope(
    exponent: &CharacteristicExponent,
    theta: f64,
    t_grid: &[f64],
    h_grid: &[f64],
    orders: &[u32],
) -> Result<SupEnvelopeFit> {
    if t_grid.is_empty() || h_grid.is_empty() || orders.is_empty() {
        return Err(Error::InsufficientGrid("empty sup-envelope grid".into()));
    }
    let n = exponent.dim();
    let mut points = Vec::new();
    for &k in orders {
        for &t in t_grid {
            for &h in h_grid {
                let mut hv = vec![0.0; n];
                hv[0] = h;
                let s = sup_increment_space(exponent, t, &hv, &Derivative::spatial(n, k), theta)?;
                points.push((k, t, h, s.value, s.envelope));
            }
        }
    }
    let (mut fitted_c, mut argmax) = (0.0f64, (orders[0], t_grid[0], h_grid[0]));
    for &(k, t, h, v, e) in &points {
        if v / e > fitted_c {
            fitted_c = v / e;
            argmax = (k, t, h);
        }
    }
    Ok(SupEnvelopeFit {
        theta,
        t_grid: t_grid.to_vec(),
        h_grid: h_grid.to_vec(),
        orders: orders.to_vec(),
        points,
        fitted_c,
        argmax,
        holds: fitted_c.is_finite(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// Exact tail from interval probabilities of a symmetric unimodal law.
    Monotone,
    /// Tail omitted; the Chebyshev bound is its error bar.
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Increment {
    pub value: f64,
    pub lattice_sum: f64,
    pub tail: f64,
    pub tail_method: TailMethod,
    /// Chebyshev bound `E‖X‖^κ₀/L^κ₀` summed over both densities.
    pub chebyshev_bound: f64,
    pub kappa0: f64,
    /// `|lattice sum − sum on the 2Δx sublattice|`.
    pub refinement_change: f64,
    pub lattice: Lattice,
}

fn chebyshev_kappa(exponent: &CharacteristicExponent) -> f64 {
    let k = 0.5 * exponent.asymptotics().re_zero.min(1.0);
    k.min(0.5 * exponent.moment_boundary())
}

fn l1_lattice(exponent: &CharacteristicExponent, t: f64, reach: f64) -> Result<Lattice> {
    let lat = Lattice::default_for(exponent, t)?;
    Ok(if lat.half_width < 2.0 * reach {
        lat.widened(2.0 * reach)
    } else {
        lat
    })
}

fn refine_check(lattice: &Lattice, abs_values: &[f64]) -> Result<(f64, f64)> {
    let fine = lattice.integrate(abs_values);
    let coarse = lattice.integrate_coarse(abs_values);
    let change = (fine - coarse).abs();
    if change > REFINEMENT_TOLERANCE {
        return Err(Error::GridTooCoarse(format!(
            "L1 sum changes by {change:.3e} under resolution halving"
        )));
    }
    Ok((fine, change))
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", "must be positive"))
    }
}

/// `∫|p_t(x+h) - p_t(x)| dx`.
pub fn l1_increment_space(exponent: &CharacteristicExponent, t: f64, h: &[f64]) -> Result<L1Increment> {
    check_t(t)?;
    if h.len() != exponent.dim() {
        return Err(Error::DimensionMismatch {
            expected: exponent.dim(),
            got: h.len(),
        });
    }
    let hn = norm(h);
    if hn > 1.0 {
        return Err(invalid("h", "need ‖h‖ ≤ 1"));
    }
    let kappa0 = chebyshev_kappa(exponent);
    let lattice = l1_lattice(exponent, t, hn)?;
    if hn == 0.0 {
        return Ok(L1Increment {
            value: 0.0,
            lattice_sum: 0.0,
            tail: 0.0,
            tail_method: TailMethod::Monotone,
            chebyshev_bound: 0.0,
            kappa0,
            refinement_change: 0.0,
            lattice,
        });
    }
    let spectrum = Spectrum::new(exponent, t, 0.0, lattice.half_width + hn)?;
    let d = Derivative::zero(exponent.dim());
    let grid = invert_on(exponent, &spectrum, t, &lattice, &d, &Multiplier::Shift(h.to_vec()))?;
    let abs: Vec<f64> = grid.values.iter().map(|v| v.abs()).collect();
    let (lattice_sum, refinement_change) = refine_check(&lattice, &abs)?;
    let moment = fourier_moment(exponent, t, kappa0)?.value;
    let chebyshev_bound = 2.0 * moment / lattice.half_width.powf(kappa0);
    let (tail, tail_method) = match &spectrum {
        Spectrum::One(s) if exponent.is_symmetric_unimodal() => {
            let (l, a) = (lattice.half_width, hn);
            let tail = s.interval_probability(l, l + a, 0.0) + s.interval_probability(-l, -l + a, 0.0);
            (tail.max(0.0), TailMethod::Monotone)
        }
        _ => (0.0, TailMethod::Chebyshev),
    };
    Ok(L1Increment {
        value: (lattice_sum + tail).min(2.0),
        lattice_sum,
        tail,
        tail_method,
        chebyshev_bound,
        kappa0,
        refinement_change,
        lattice,
    })
}

/// `∫|p_{t+ε}(x) - p_t(x)| dx`.
pub fn l1_increment_time(exponent: &CharacteristicExponent, t: f64, eps: f64) -> Result<L1Increment> {
    check_t(t)?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid("eps", "must be finite and non-negative"));
    }
    let kappa0 = chebyshev_kappa(exponent);
    let lattice = Lattice::default_for(exponent, t)?;
    if eps == 0.0 {
        return Ok(L1Increment {
            value: 0.0,
            lattice_sum: 0.0,
            tail: 0.0,
            tail_method: TailMethod::Monotone,
            chebyshev_bound: 0.0,
            kappa0,
            refinement_change: 0.0,
            lattice,
        });
    }
    let spectrum = Spectrum::new(exponent, t, 0.0, lattice.half_width)?;
    let d = Derivative::zero(exponent.dim());
    let grid = invert_on(exponent, &spectrum, t, &lattice, &d, &Multiplier::TimeStep(eps))?;
    let abs: Vec<f64> = grid.values.iter().map(|v| v.abs()).collect();
    let (lattice_sum, refinement_change) = refine_check(&lattice, &abs)?;
    let m0 = fourier_moment(exponent, t, kappa0)?.value;
    let m1 = fourier_moment(exponent, t + eps, kappa0)?.value;
    let chebyshev_bound = (m0 + m1) / lattice.half_width.powf(kappa0);
    let last = grid.values.len() - 1;
    let edges_grow = grid.values[0] >= 0.0 && grid.values[last] >= 0.0;
    let (tail, tail_method) = match &spectrum {
        Spectrum::One(s) if exponent.is_symmetric_unimodal() && edges_grow => {
            let tail = outside(s, lattice.half_width, eps) - outside(s, lattice.half_width, 0.0);
            (tail.max(0.0), TailMethod::Monotone)
        }
        _ => (0.0, TailMethod::Chebyshev),
    };
    Ok(L1Increment {
        value: (lattice_sum + tail).min(2.0),
        lattice_sum,
        tail,
        tail_method,
        chebyshev_bound,
        kappa0,
        refinement_change,
        lattice,
    })
}

fn outside(s: &Spectrum1, l: f64, eps: f64) -> f64 {
    s.outside_mass(l, eps)
}

/// Parameters of the L¹ increment bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1BoundParams {
    pub theta: f64,
    pub tau: f64,
    pub omega: f64,
    pub kappa: f64,
    pub kappa0: f64,
}

impl L1BoundParams {
    pub fn new(theta: f64, tau: f64, omega: f64, kappa: f64, kappa0: f64) -> Result<Self> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(invalid("theta", "must lie in (0, 1]"));
        }
        if !open(tau) {
            return Err(invalid("tau", "must lie in (0, 1)"));
        }
        if !open(omega) {
            return Err(invalid("omega", "must lie in (0, 1)"));
        }
        if !open(kappa0) {
            return Err(invalid("kappa0", "must lie in (0, 1)"));
        }
        if !(kappa > 0.0 && kappa < kappa0 / 2.0) {
            return Err(invalid("kappa", "must lie in (0, kappa0/2)"));
        }
        Ok(Self {
            theta,
            tau,
            omega,
            kappa,
            kappa0,
        })
    }

    /// `τκ₀θ/(n+κ₀)`.
    pub fn space_exponent(&self, n: usize) -> f64 {
        self.tau * self.kappa0 * self.theta / (n as f64 + self.kappa0)
    }

    /// `ωκ₀θ/(n+κ₀)`.
    pub fn time_exponent(&self, n: usize) -> f64 {
        self.omega * self.kappa0 * self.theta / (n as f64 + self.kappa0)
    }

    /// `(θ+n)/β_∞ + κ`.
    pub fn space_blowup(&self, n: usize, beta: f64) -> f64 {
        (self.theta + n as f64) / beta + self.kappa
    }

    /// `(2θ+n)/β_∞ + κ`.
    pub fn time_blowup(&self, n: usize, beta: f64) -> f64 {
        (2.0 * self.theta + n as f64) / beta + self.kappa
    }

    /// `(h^θ / t^{blowup})^{τκ₀/(n+κ₀)}` or the temporal analogue.
    pub fn bound_shape(&self, kind: IncrementKind, n: usize, beta: f64, t: f64, step: f64) -> f64 {
        let nf = n as f64;
        match kind {
            IncrementKind::Space => (step.powf(self.theta) / t.powf(self.space_blowup(n, beta)))
                .powf(self.tau * self.kappa0 / (nf + self.kappa0)),
            IncrementKind::Time => (step.powf(self.theta) / t.powf(self.time_blowup(n, beta)))
                .powf(self.omega * self.kappa0 / (nf + self.kappa0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IncrementKind {
    Space,
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Fit {
    pub kind: IncrementKind,
    pub params: L1BoundParams,
    pub beta_inf: f64,
    pub t_grid: Vec<f64>,
    pub step_grid: Vec<f64>,
    /// `values[i][j]` at `(t_grid[i], step_grid[j])`.
    pub values: Vec<Vec<f64>>,
    pub bounds: Vec<Vec<f64>>,
    pub fitted_c: f64,
    pub argmax: (f64, f64),
    /// Fit of `log value` against `log step` for each `t`.
    pub step_slopes: Vec<LinearFit>,
    /// Fit of `log value` against `log t` for each step.
    pub t_slopes: Vec<LinearFit>,
    /// Exponent of the step in the bound.
    pub paper_exponent: f64,
    pub max_value: f64,
    pub passes: bool,
}

/// Measures L¹ increments on a `t × step` grid and fits one constant
/// `C ≥ 1` with `value ≤ C·bound_shape` everywhere.
pub fn fit_l1_exponents(
    exponent: &CharacteristicExponent,
    params: &L1BoundParams,
    kind: IncrementKind,
    t_grid: &[f64],
    step_grid: &[f64],
) -> Result<L1Fit> {
    if t_grid.len() < 2 || step_grid.len() < 2 {
        return Err(Error::InsufficientGrid(
            "L1 fits need at least two times and two increments".into(),
        ));
    }
    if step_grid.iter().chain(t_grid).any(|v| !(*v > 0.0)) {
        return Err(invalid("grid", "grid values must be positive"));
    }
    let n = exponent.dim();
    let beta = exponent.asymptotics().re_inf;
    let mut values = Vec::with_capacity(t_grid.len());
    let mut bounds = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut row = Vec::with_capacity(step_grid.len());
        let mut brow = Vec::with_capacity(step_grid.len());
        for &s in step_grid {
            let v = match kind {
                IncrementKind::Space => {
                    let mut h = vec![0.0; n];
                    h[0] = s;
                    l1_increment_space(exponent, t, &h)?.value
                }
                IncrementKind::Time => l1_increment_time(exponent, t, s)?.value,
            };
            row.push(v);
            brow.push(params.bound_shape(kind, n, beta, t, s));
        }
        values.push(row);
        bounds.push(brow);
    }
    let mut ratio_max = f64::NEG_INFINITY;
    let mut argmax = (t_grid[0], step_grid[0]);
    let mut max_value: f64 = 0.0;
    for (i, &t) in t_grid.iter().enumerate() {
        for (j, &s) in step_grid.iter().enumerate() {
            let r = values[i][j] / bounds[i][j];
            max_value = max_value.max(values[i][j]);
            if r > ratio_max {
                ratio_max = r;
                argmax = (t, s);
            }
        }
    }
    let fitted_c = ratio_max.max(1.0);
    let step_slopes = values
        .iter()
        .map(|row| log_log_fit(step_grid, row))
        .collect::<Result<Vec<_>>>()?;
    let t_slopes = (0..step_grid.len())
        .map(|j| {
            let col: Vec<f64> = values.iter().map(|row| row[j]).collect();
            log_log_fit(t_grid, &col)
        })
        .collect::<Result<Vec<_>>>()?;
    let paper_exponent = match kind {
        IncrementKind::Space => params.space_exponent(n),
        IncrementKind::Time => params.time_exponent(n),
    };
    let dominated = values
        .iter()
        .zip(&bounds)
        .all(|(r, b)| r.iter().zip(b).all(|(v, bd)| *v <= fitted_c * bd * (1.0 + 1e-12)));
    let passes = fitted_c.is_finite()
        && dominated
        && max_value <= 2.0 + 1e-9
        && step_slopes.iter().all(|f| f.slope >= paper_exponent - 0.02);
    Ok(L1Fit {
        kind,
        params: *params,
        beta_inf: beta,
        t_grid: t_grid.to_vec(),
        step_grid: step_grid.to_vec(),
        values,
        bounds,
        fitted_c,
        argmax,
        step_slopes,
        t_slopes,
        paper_exponent,
        max_value,
        passes,
    })
}
