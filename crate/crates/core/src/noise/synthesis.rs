use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::{NoiseKind, SpectralNoiseModel};
use crate::error::{invalid, Error, Result};

/// Periodic grid with `points` sites per side on `[0, length)ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusLattice {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
}

impl TorusLattice {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid("dimension", "supported dimensions are 1, 2, 3"));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(invalid("points", "must be a power of two, at least 4"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("length", "must be positive"));
        }
        Ok(Self { dim, points, length })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dual cell volume `(2π/L)ⁿ`.
    pub fn dual_cell(&self) -> f64 {
        (2.0 * PI / self.length).powi(self.dim as i32)
    }

    /// Axis frequencies in FFT order: `2πk/L`, `k = 0, 1, …, N/2-1, -N/2, …, -1`.
    pub fn axis_frequencies(&self) -> Vec<f64> {
        let n = self.points as i64;
        (0..n)
            .map(|k| {
                let k = if k < n / 2 { k } else { k - n };
                2.0 * PI * k as f64 / self.length
            })
            .collect()
    }

    /// Row-major multi-index of a linear index (last axis fastest).
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            out[d] = idx % self.points;
            idx /= self.points;
        }
        out
    }

    /// Frequency vector of every dual mode, row-major.
    pub fn modes(&self) -> Vec<Vec<f64>> {
        let f = self.axis_frequencies();
        (0..self.len())
            .map(|i| self.unravel(i).into_iter().map(|k| f[k]).collect())
            .collect()
    }

    fn partner(&self, idx: usize) -> usize {
        let n = self.points;
        self.unravel(idx)
            .into_iter()
            .fold(0, |acc, k| acc * n + (n - k) % n)
    }
}

/// Unnormalized multi-dimensional FFT on a torus lattice.
#[derive(Clone)]
pub(crate) struct TorusFft {
    dim: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl TorusFft {
    pub(crate) fn new(lattice: &TorusLattice) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim: lattice.dim,
            n: lattice.points,
            forward: planner.plan_fft_forward(lattice.points),
            inverse: planner.plan_fft_inverse(lattice.points),
        }
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        fft.process(data);
        let mut buf = vec![Complex64::default(); n];
        let mut stride = n;
        for _ in 1..self.dim {
            let block = stride * n;
            for chunk in data.chunks_mut(block) {
                for offset in 0..stride {
                    for (k, b) in buf.iter_mut().enumerate() {
                        *b = chunk[offset + k * stride];
                    }
                    fft.process(&mut buf);
                    for (k, b) in buf.iter().enumerate() {
                        chunk[offset + k * stride] = *b;
                    }
                }
            }
            stride = block;
        }
    }

    /// `x̂_k = Σ_j x_j e^{-iξ_k·x_j}`.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(&self.forward, data);
    }

    /// `x_j = Σ_k x̂_k e^{iξ_k·x_j}` (no `1/Nⁿ`).
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(&self.inverse, data);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroMode {
    /// Weight from the limit of the density at the origin.
    Limit,
    /// Singular density; the mode carries no weight.
    Dropped,
}

/// Spectral weight `c·f(‖ξ_k‖)·(2π/L)ⁿ` of every dual mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeWeights {
    pub weights: Vec<f64>,
    pub zero_mode: ZeroMode,
}

impl ModeWeights {
    /// `Cov(W(0), W(x_j))/Δt = Σ_k w_k cos(ξ_k·x_j)` at lattice offset `j`
    /// along the first axis.
    pub fn covariance_along_axis(&self, lattice: &TorusLattice, j: usize) -> f64 {
        let x = j as f64 * lattice.dx();
        lattice
            .modes()
            .iter()
            .zip(&self.weights)
            .map(|(xi, w)| w * (xi[0] * x).cos())
            .sum()
    }
}

pub fn mode_weights(noise: &SpectralNoiseModel, lattice: &TorusLattice) -> Result<ModeWeights> {
    if noise.dim != lattice.dim {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim,
            got: noise.dim,
        });
    }
    let cell = lattice.dual_cell();
    let zero_mode = if matches!(noise.kind, NoiseKind::Riesz { .. }) {
        ZeroMode::Dropped
    } else {
        ZeroMode::Limit
    };
    let weights = lattice
        .modes()
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            if i == 0 {
                match zero_mode {
                    ZeroMode::Limit => noise.density_at_origin().unwrap_or(0.0) * cell,
                    ZeroMode::Dropped => 0.0,
                }
            } else {
                noise.density(xi) * cell
            }
        })
        .collect();
    Ok(ModeWeights { weights, zero_mode })
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Real(usize),
    Pair(usize, usize),
}

/// Draws Fourier coefficients `Ŵ_k = Nⁿ·A_k` of a noise increment, where
/// the `A_k` are Hermitian complex Gaussians with `E|A_k|² = w_k·Δt`.
#[derive(Clone)]
pub(crate) struct NoiseSynth {
    slots: Vec<Slot>,
    amp: Vec<f64>,
}

impl NoiseSynth {
    pub(crate) fn new(weights: &ModeWeights, lattice: &TorusLattice, dt: f64) -> Self {
        let scale = lattice.len() as f64;
        let mut slots = Vec::new();
        for k in 0..lattice.len() {
            let p = lattice.partner(k);
            if p == k {
                slots.push(Slot::Real(k));
            } else if k < p {
                slots.push(Slot::Pair(k, p));
            }
        }
        let amp = weights.weights.iter().map(|w| scale * (w * dt).sqrt()).collect();
        Self { slots, amp }
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [Complex64]) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for s in &self.slots {
            match *s {
                Slot::Real(k) => {
                    let g: f64 = StandardNormal.sample(rng);
                    out[k] = Complex64::new(self.amp[k] * g, 0.0);
                }
                Slot::Pair(k, p) => {
                    let a: f64 = StandardNormal.sample(rng);
                    let b: f64 = StandardNormal.sample(rng);
                    let z = Complex64::new(a * h, b * h) * self.amp[k];
                    out[k] = z;
                    out[p] = z.conj();
                }
            }
        }
    }
}

/// One time-slice increment `ΔF` of the noise on a torus lattice: Gaussian,
/// variance proportional to `Δt`, spatial covariance `Σ_k w_k e^{iξ_k·x}`.
pub fn synthesize_noise_increment(
    noise: &SpectralNoiseModel,
    lattice: &TorusLattice,
    dt: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be positive"));
    }
    let weights = mode_weights(noise, lattice)?;
    let synth = NoiseSynth::new(&weights, lattice, dt);
    let fft = TorusFft::new(lattice);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![Complex64::default(); lattice.len()];
    synth.draw(&mut rng, &mut buf);
    fft.inverse(&mut buf);
    let norm = 1.0 / lattice.len() as f64;
    Ok(buf.iter().map(|z| z.re * norm).collect())
}
