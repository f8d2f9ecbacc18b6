//! Transition densities `p_t(x) = (2π)^{-n}∫ e^{-tΨ(ξ)} e^{-i⟨x,ξ⟩} dξ`.
//!
//! Densities are evaluated by direct quadrature of the inversion integral on
//! a lattice. Derivatives and increments are obtained by multiplying the
//! integrand with `(-Ψ)^{α₀}∏(-iξ_j)^{α_j}`, `e^{-i⟨h,ξ⟩} - 1` or
//! `e^{-εΨ} - 1`, so differences are never formed by cancellation.

mod cache;
mod increments;
mod inversion;

pub use cache::DensityCache;
pub use increments::{
    fit_l1_exponents, fit_sup_envelope, l1_increment_space, l1_increment_time, sup_increment_space,
    sup_increment_time, IncrementKind, L1BoundParams, L1Fit, L1Increment, SupEnvelopeFit, SupIncrement,
    TailMethod, REFINEMENT_TOLERANCE,
};
pub use inversion::{
    characteristic_width, frequency_cutoff, invert_density, invert_with, Derivative, DensityGrid, Lattice,
    Multiplier, CUTOFF_TOLERANCE, RESIDUE_TOLERANCE,
};
