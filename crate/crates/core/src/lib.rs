//! Numerical toolkit for Lévy-driven stochastic heat equations.
//!
//! * [`levy`]: characteristic exponents from closed forms or Lévy triplets,
//!   asymptotic envelopes, growth and integrability checks.
//! * [`density`]: transition densities by direct Fourier inversion, sup-norm
//!   and L¹ increments, and fits against the power-law increment bounds.
//! * [`moments`]: exact samplers, fractional moments by Monte Carlo and by
//!   the Fourier identity, growth-rate verification.
//! * [`noise`]: spectral noise models, Dalang integral, fractal indices and
//!   torus noise synthesis.
//! * [`spde`]: exponential-Euler mild-solution simulator, Hölder exponent
//!   estimation and the admissible exponent ranges.
//! * [`config`], [`report`], [`experiment`]: the batch front-end used by the
//!   `levyfield` binary.

pub mod config;
pub mod density;
pub mod error;
pub mod experiment;
pub mod levy;
pub mod moments;
pub mod noise;
pub mod quadrature;
pub mod report;
pub mod spde;
pub mod stats;

pub use error::{Error, Result};
pub use levy::{CharacteristicExponent, LevyMeasure, LevyTriplet};
pub use noise::SpectralNoiseModel;
