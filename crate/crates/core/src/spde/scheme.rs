use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ModelSpec, ScalarMap};
use crate::error::{invalid, Error, Result};
use crate::noise::{dalang_check, mode_weights, NoiseSynth, TorusFft, TorusLattice, ZeroMode};

/// Largest accepted `max|Im u| / max(1, max|Re u|)` after an inverse transform.
pub const RESIDUE_TOLERANCE: f64 = 1e-8;

/// Recorded rows `u(i·row_dt, x_j)`, row-major, row 0 at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldPath {
    pub lattice: TorusLattice,
    pub row_dt: f64,
    pub scheme_dt: f64,
    pub seed: u64,
    pub replica: u64,
    pub mode_cutoff: usize,
    pub values: Vec<f64>,
}

impl FieldPath {
    pub fn rows(&self) -> usize {
        self.values.len() / self.lattice.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.lattice.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.row_dt
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.rows().saturating_sub(1))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Precomputed multipliers and noise plan for one model, lattice and step.
#[derive(Clone)]
pub struct Simulation {
    model: ModelSpec,
    lattice: TorusLattice,
    dt: f64,
    steps: usize,
    record_every: usize,
    multiplier: Vec<Complex64>,
    synth: NoiseSynth,
    fft: TorusFft,
    zero_mode: ZeroMode,
    u0: Vec<f64>,
    explicit_b: ScalarMap,
    spectral: bool,
}

fn residue(buf: &[Complex64], scale: f64) -> f64 {
    let (mut im, mut re) = (0.0f64, 0.0f64);
    for z in buf {
        im = im.max(z.im.abs());
        re = re.max(z.re.abs());
    }
    im * scale / (re * scale).max(1.0)
}

fn check_residue(r: f64) -> Result<()> {
    if r > RESIDUE_TOLERANCE {
        return Err(Error::ImaginaryResidue {
            residue: r,
            tolerance: RESIDUE_TOLERANCE,
        });
    }
    Ok(())
}

impl Simulation {
    /// `record_every` steps between stored rows; `horizon/dt` must be an
    /// integer multiple of it.
    pub fn new(model: &ModelSpec, lattice: TorusLattice, horizon: f64, dt: f64, record_every: usize) -> Result<Self> {
        model.validate()?;
        if model.noise.dim != lattice.dim {
            return Err(Error::DimensionMismatch {
                expected: lattice.dim,
                got: model.noise.dim,
            });
        }
        if !(dt > 0.0 && dt.is_finite()) || !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid("dt", "time step and horizon must be positive"));
        }
        let steps = (horizon / dt).round() as usize;
        if steps == 0 || (steps as f64 * dt - horizon).abs() > 1e-9 * horizon {
            return Err(invalid("dt", "horizon must be an integer number of steps"));
        }
        if record_every == 0 || steps % record_every != 0 {
            return Err(invalid("record_every", "must divide the number of steps"));
        }
        if model.sigma != ScalarMap::Zero && !dalang_check(&model.noise, &model.exponent)?.finite {
            return Err(Error::AssumptionViolated(format!(
                "Dalang integral diverges for {} noise with {}",
                model.noise.name(),
                model.exponent.name()
            )));
        }
        let (lambda, explicit_b) = match model.b {
            ScalarMap::Linear { lambda } => (lambda, ScalarMap::Zero),
            b => (0.0, b),
        };
        let iso = model.exponent.is_isotropic();
        let multiplier = lattice
            .modes()
            .iter()
            .map(|xi| {
                let psi = if iso {
                    model.exponent.psi_radial(xi.iter().map(|v| v * v).sum::<f64>().sqrt())?
                } else {
                    model.exponent.psi(xi)?
                };
                Ok((-(psi - lambda) * dt).exp())
            })
            .collect::<Result<Vec<_>>>()?;
        if multiplier.iter().any(|m| !m.norm().is_finite()) {
            return Err(Error::Overflow("semigroup multiplier".into()));
        }
        let weights = mode_weights(&model.noise, &lattice)?;
        let synth = NoiseSynth::new(&weights, &lattice, dt);
        let dx = lattice.dx();
        let u0 = (0..lattice.len())
            .map(|i| model.u0.eval(lattice.unravel(i)[0] as f64 * dx, lattice.length))
            .collect();
        let spectral = matches!(model.sigma, ScalarMap::Zero | ScalarMap::Constant { .. })
            && matches!(explicit_b, ScalarMap::Zero | ScalarMap::Constant { .. });
        Ok(Self {
            model: model.clone(),
            lattice,
            dt,
            steps,
            record_every,
            multiplier,
            synth,
            fft: TorusFft::new(&lattice),
            zero_mode: weights.zero_mode,
            u0,
            explicit_b,
            spectral,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn zero_mode(&self) -> ZeroMode {
        self.zero_mode
    }

    pub fn initial(&self) -> &[f64] {
        &self.u0
    }

    /// Whether the linear recursion runs in Fourier space.
    pub fn is_spectral(&self) -> bool {
        self.spectral
    }

    pub fn rng(seed: u64, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replica);
        rng
    }

    /// One exponential-Euler step in physical space.
    pub fn step(&self, u: &mut [f64], rng: &mut ChaCha8Rng, buf: &mut [Complex64]) -> Result<()> {
        let scale = 1.0 / self.lattice.len() as f64;
        self.synth.draw(rng, buf);
        self.fft.inverse(buf);
        check_residue(residue(buf, scale))?;
        for (z, v) in buf.iter_mut().zip(u.iter()) {
            let df = z.re * scale;
            let w = v + self.explicit_b.eval(*v) * self.dt + self.model.sigma.eval(*v) * df;
            *z = Complex64::new(w, 0.0);
        }
        self.fft.forward(buf);
        for (z, m) in buf.iter_mut().zip(&self.multiplier) {
            *z *= m;
        }
        self.fft.inverse(buf);
        check_residue(residue(buf, scale))?;
        for (v, z) in u.iter_mut().zip(buf.iter()) {
            *v = z.re * scale;
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow("field values left the f64 range".into()));
        }
        Ok(())
    }

    pub fn run(&self, seed: u64, replica: u64) -> Result<FieldPath> {
        let mut rng = Self::rng(seed, replica);
        let n = self.lattice.len();
        let rows = self.steps / self.record_every + 1;
        let mut values = Vec::with_capacity(rows * n);
        values.extend_from_slice(&self.u0);
        if self.spectral {
            self.run_spectral(&mut rng, &mut values)?;
        } else {
            let mut u = self.u0.clone();
            let mut buf = vec![Complex64::default(); n];
            for i in 1..=self.steps {
                self.step(&mut u, &mut rng, &mut buf)?;
                if i % self.record_every == 0 {
                    values.extend_from_slice(&u);
                }
            }
        }
        Ok(FieldPath {
            lattice: self.lattice,
            row_dt: self.dt * self.record_every as f64,
            scheme_dt: self.dt,
            seed,
            replica,
            mode_cutoff: self.lattice.points / 2,
            values,
        })
    }

    fn run_spectral(&self, rng: &mut ChaCha8Rng, values: &mut Vec<f64>) -> Result<()> {
        let n = self.lattice.len();
        let scale = 1.0 / n as f64;
        let sigma = self.model.sigma.eval(0.0);
        let drift = self.explicit_b.eval(0.0) * self.dt * n as f64;
        let mut state: Vec<Complex64> = self.u0.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.fft.forward(&mut state);
        let mut noise = vec![Complex64::default(); n];
        let mut out = vec![Complex64::default(); n];
        for i in 1..=self.steps {
            self.synth.draw(rng, &mut noise);
            state[0] += drift;
            for ((s, w), m) in state.iter_mut().zip(&noise).zip(&self.multiplier) {
                *s = (*s + w * sigma) * m;
            }
            if i % self.record_every == 0 {
                out.copy_from_slice(&state);
                self.fft.inverse(&mut out);
                check_residue(residue(&out, scale))?;
                let start = values.len();
                values.extend(out.iter().map(|z| z.re * scale));
                if values[start..].iter().any(|v| !v.is_finite()) {
                    return Err(Error::Overflow("field values left the f64 range".into()));
                }
            }
        }
        Ok(())
    }
}

/// One step from `state` with noise drawn from `seed`.
pub fn step_mild(state: &[f64], model: &ModelSpec, lattice: &TorusLattice, dt: f64, seed: u64) -> Result<Vec<f64>> {
    if state.len() != lattice.len() {
        return Err(Error::DimensionMismatch {
            expected: lattice.len(),
            got: state.len(),
        });
    }
    let sim = Simulation::new(model, *lattice, dt, dt, 1)?;
    let mut u = state.to_vec();
    let mut buf = vec![Complex64::default(); lattice.len()];
    sim.step(&mut u, &mut Simulation::rng(seed, 0), &mut buf)?;
    Ok(u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOutput {
    pub paths: Vec<FieldPath>,
    /// `(p, max_{i,j} mean_r |u_r(t_i, x_j)|^{2p})` for `p ∈ {1, 2, 4}`.
    pub moment_sup: Vec<(u32, f64)>,
    pub zero_mode: ZeroMode,
}

pub(crate) fn moment_sup(paths: &[FieldPath]) -> Vec<(u32, f64)> {
    [1u32, 2, 4]
        .iter()
        .map(|&p| {
            let len = paths.first().map_or(0, |f| f.values.len());
            let mut acc = vec![0.0; len];
            for f in paths {
                for (a, v) in acc.iter_mut().zip(&f.values) {
                    *a += v.abs().powi(2 * p as i32);
                }
            }
            let r = paths.len().max(1) as f64;
            (p, acc.iter().fold(0.0f64, |m, a| m.max(a / r)))
        })
        .collect()
}

/// Independent replicas on `[0, horizon]`, replica `r` drawing from stream
/// `r` of `ChaCha8Rng::seed_from_u64(seed)`.
pub fn simulate(
    model: &ModelSpec,
    horizon: f64,
    dt: f64,
    lattice: &TorusLattice,
    replicas: usize,
    seed: u64,
    record_every: usize,
) -> Result<SimulationOutput> {
    let sim = Simulation::new(model, *lattice, horizon, dt, record_every)?;
    let paths = (0..replicas as u64)
        .into_par_iter()
        .map(|r| sim.run(seed, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationOutput {
        moment_sup: moment_sup(&paths),
        zero_mode: sim.zero_mode(),
        paths,
    })
}
