use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::inversion::{invert_density, Derivative, DensityGrid, Lattice};
use crate::error::Result;
use crate::levy::CharacteristicExponent;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    exponent: String,
    t: u64,
    dx: u64,
    half_width: u64,
    derivative: Derivative,
}

/// Concurrent memo of inverted densities. Entries are immutable once
/// inserted; concurrent misses on one key may compute twice but store once.
#[derive(Debug, Default)]
pub struct DensityCache {
    map: RwLock<HashMap<Key, Arc<DensityGrid>>>,
}

impl DensityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_compute(
        &self,
        exponent: &CharacteristicExponent,
        t: f64,
        lattice: &Lattice,
        derivative: &Derivative,
    ) -> Result<Arc<DensityGrid>> {
        let key = Key {
            exponent: exponent.id(),
            t: t.to_bits(),
            dx: lattice.dx.to_bits(),
            half_width: lattice.half_width.to_bits(),
            derivative: derivative.clone(),
        };
        if let Some(g) = self.map.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(g);
        }
        let grid = Arc::new(invert_density(exponent, t, lattice, derivative)?);
        let mut m = self.map.write().unwrap_or_else(|e| e.into_inner());
        Ok(m.entry(key).or_insert(grid).clone())
    }
}
