//! Exact samplers for the catalog. All transcendental functions come from
//! `libm` so a given `(exponent, t, seed)` yields the same bits everywhere.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::levy::{norm, CharacteristicExponent, ExponentKind, LevyMeasure, LevyTriplet};

#[derive(Debug, Clone)]
enum Law {
    Gaussian { scale: f64 },
    Stable { alpha: f64, scale: f64 },
    Tempered { alpha: f64, lambda: f64, scale: f64 },
    Compound { drift: Vec<f64>, atoms: Vec<(Vec<f64>, f64)> },
}

/// Draws `X_t` for a catalog exponent.
#[derive(Debug, Clone)]
pub struct Sampler {
    dim: usize,
    law: Law,
}

fn open01(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    -libm::log(open01(rng))
}

/// Standard normals by the Box–Muller transform.
pub(crate) fn fill_normals(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut i = 0;
    while i < out.len() {
        let r = libm::sqrt(-2.0 * libm::log(open01(rng)));
        let th = 2.0 * PI * rng.random::<f64>();
        out[i] = r * libm::cos(th);
        if i + 1 < out.len() {
            out[i + 1] = r * libm::sin(th);
        }
        i += 2;
    }
}

/// Symmetric stable with `E e^{iξX} = e^{-|ξ|^α}` (Chambers–Mallows–Stuck).
fn symmetric_stable(alpha: f64, rng: &mut ChaCha8Rng) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    if alpha == 1.0 {
        return libm::tan(v);
    }
    let w = exp1(rng);
    libm::sin(alpha * v) / libm::pow(libm::cos(v), 1.0 / alpha)
        * libm::pow(libm::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha)
}

/// Positive stable with `E e^{-uS} = e^{-u^a}`, `0 < a < 1` (Kanter).
fn positive_stable(a: f64, rng: &mut ChaCha8Rng) -> f64 {
    let u = open01(rng);
    let e = exp1(rng);
    let num = libm::pow(libm::sin(a * PI * u), a / (1.0 - a)) * libm::sin((1.0 - a) * PI * u);
    let den = libm::pow(libm::sin(PI * u), 1.0 / (1.0 - a));
    libm::pow(num / den / e, (1.0 - a) / a)
}

/// Poisson count: Knuth's product method on pieces of mean at most 16.
fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    let pieces = (mean / 16.0).ceil().max(1.0) as u64;
    let m = mean / pieces as f64;
    let limit = libm::exp(-m);
    let mut total = 0;
    for _ in 0..pieces {
        let mut p = 1.0;
        loop {
            p *= rng.random::<f64>();
            if p <= limit {
                break;
            }
            total += 1;
        }
    }
    total
}

/// Deterministic velocity of an atom-only triplet:
/// `X_t = t·v + Σ N_i x_i` with independent Poisson counts `N_i`.
pub(crate) fn atom_velocity(triplet: &LevyTriplet) -> Vec<f64> {
    let mut v: Vec<f64> = triplet.drift.iter().map(|a| -a).collect();
    if let LevyMeasure::Atoms { atoms } = &triplet.measure {
        for a in atoms.iter().filter(|a| norm(&a.location) <= 1.0) {
            for (d, x) in v.iter_mut().zip(&a.location) {
                *d -= a.mass * x;
            }
        }
    }
    v
}

impl Sampler {
    pub fn new(exponent: &CharacteristicExponent) -> Result<Self> {
        let law = match exponent.kind() {
            ExponentKind::Brownian { scale } => Law::Gaussian { scale: *scale },
            ExponentKind::Stable { alpha, scale } => Law::Stable {
                alpha: *alpha,
                scale: *scale,
            },
            ExponentKind::TemperedStable {
                alpha,
                lambda,
                scale,
            } => Law::Tempered {
                alpha: *alpha,
                lambda: *lambda,
                scale: *scale,
            },
            ExponentKind::CompoundPoisson { triplet } => match &triplet.measure {
                LevyMeasure::Atoms { atoms } => {
                    Law::Compound {
                        drift: atom_velocity(triplet),
                        atoms: atoms.iter().map(|a| (a.location.clone(), a.mass)).collect(),
                    }
                }
                _ => unreachable!("compound Poisson exponents carry atoms"),
            },
            ExponentKind::Triplet(_) => {
                return Err(Error::SamplerUnavailable(exponent.id()));
            }
        };
        Ok(Self {
            dim: exponent.dim(),
            law,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Velocity of the deterministic compensation for compound Poisson laws;
    /// `X_t + t·v` counts jumps only.
    pub fn compensation(&self) -> Option<Vec<f64>> {
        match &self.law {
            Law::Compound { drift, .. } => Some(drift.iter().map(|d| -d).collect()),
            _ => None,
        }
    }

    /// Writes one draw of `X_t` into `out`.
    pub fn draw(&self, t: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        if t == 0.0 {
            out.fill(0.0);
            return;
        }
        match &self.law {
            Law::Gaussian { scale } => {
                fill_normals(rng, out);
                let s = libm::sqrt(2.0 * scale * t);
                out.iter_mut().for_each(|v| *v *= s);
            }
            Law::Stable { alpha, scale } => {
                let k = libm::pow(scale * t, 1.0 / alpha);
                if self.dim == 1 {
                    out[0] = k * symmetric_stable(*alpha, rng);
                } else {
                    let a = positive_stable(alpha / 2.0, rng);
                    fill_normals(rng, out);
                    let s = k * libm::sqrt(2.0 * a);
                    out.iter_mut().for_each(|v| *v *= s);
                }
            }
            Law::Tempered {
                alpha,
                lambda,
                scale,
            } => {
                let a = alpha / 2.0;
                let lam2 = lambda * lambda;
                let pieces = (scale * t * libm::pow(*lambda, *alpha)).ceil().max(1.0) as usize;
                let tau = t / pieces as f64;
                let k = libm::pow(scale * tau, 1.0 / a);
                let mut s = 0.0;
                for _ in 0..pieces {
                    loop {
                        let y = k * positive_stable(a, rng);
                        if rng.random::<f64>() <= libm::exp(-lam2 * y) {
                            s += y;
                            break;
                        }
                    }
                }
                fill_normals(rng, out);
                let f = libm::sqrt(2.0 * s);
                out.iter_mut().for_each(|v| *v *= f);
            }
            Law::Compound { drift, atoms } => {
                for (o, d) in out.iter_mut().zip(drift) {
                    *o = d * t;
                }
                for (loc, mass) in atoms {
                    let k = poisson(mass * t, rng) as f64;
                    for (o, x) in out.iter_mut().zip(loc) {
                        *o += k * x;
                    }
                }
            }
        }
    }
}

/// One draw of `X_t` from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn sample_increment(exponent: &CharacteristicExponent, t: f64, seed: u64) -> Result<Vec<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(crate::error::invalid("t", "must be finite and non-negative"));
    }
    let sampler = Sampler::new(exponent)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; exponent.dim()];
    sampler.draw(t, &mut rng, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_stable_laplace_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = 0.75;
        let n = 200_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += (-positive_stable(a, &mut rng)).exp();
        }
        let m = acc / n as f64;
        assert!((m - (-1f64).exp()).abs() < 3e-3, "{m}");
    }

    #[test]
    fn poisson_mean_and_zero_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut zeros = 0;
        let mut sum = 0;
        for _ in 0..n {
            let k = poisson(40.0, &mut rng);
            sum += k;
        }
        for _ in 0..n {
            if poisson(1.0, &mut rng) == 0 {
                zeros += 1;
            }
        }
        assert!((sum as f64 / n as f64 - 40.0).abs() < 0.1);
        assert!((zeros as f64 / n as f64 - (-1f64).exp()).abs() < 0.005);
    }

    #[test]
    fn same_seed_same_bits() {
        let e = CharacteristicExponent::tempered_stable(2, 1.5, 1.0).unwrap();
        let a = sample_increment(&e, 0.7, 11).unwrap();
        let b = sample_increment(&e, 0.7, 11).unwrap();
        assert_eq!(a, b);
        let c = sample_increment(&e, 0.7, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn custom_triplet_has_no_sampler() {
        let s = CharacteristicExponent::stable(1, 1.5).unwrap();
        let t = CharacteristicExponent::from_triplet(s.triplet().unwrap()).unwrap();
        assert!(matches!(sample_increment(&t, 1.0, 0), Err(Error::SamplerUnavailable(_))));
    }
}
