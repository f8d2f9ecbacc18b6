use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FieldPath, RangeBundle};
use crate::error::{invalid, Error, Result};
use crate::noise::TorusLattice;
use crate::stats::{linear_fit, quantile};

pub const MIN_HOLDER_REPLICAS: usize = 500;
pub const MIN_R_SQUARED: f64 = 0.95;
pub const BOOTSTRAP_RESAMPLES: usize = 200;
const MIN_DECADES: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Space,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderOptions {
    /// Largest spatial lag.
    pub lag_cap: f64,
    /// Smallest lag in lattice spacings (space) or scheme steps (time).
    pub min_lag_steps: f64,
    /// Rows with `t ≥ window_start·T` enter the estimate.
    pub window_start: f64,
    pub min_replicas: usize,
    pub bootstrap_seed: u64,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            lag_cap: 1.0,
            min_lag_steps: 4.0,
            window_start: 0.5,
            min_replicas: MIN_HOLDER_REPLICAS,
            bootstrap_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderFit {
    /// Moment order `2p`.
    pub order: u32,
    /// `slope / 2p`.
    pub exponent: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    /// Replica means of `|Δu|^{2p}` per lag.
    pub structure: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    pub direction: Direction,
    pub lags: Vec<f64>,
    pub orders: Vec<u32>,
    pub replicas: usize,
    pub window: (f64, f64),
    pub fits: Vec<HolderFit>,
    pub predicted: Option<f64>,
    pub consistent: Option<bool>,
}

impl HolderReport {
    /// Compares every fit against the admissible exponent for its
    /// direction: consistent when `exponent + CI width ≥ predicted`.
    pub fn compare(&mut self, range: &RangeBundle) {
        let p = match self.direction {
            Direction::Space => range.spatial_holder,
            Direction::Time => range.temporal_holder,
        };
        self.predicted = Some(p);
        self.consistent = Some(self.fits.iter().all(|f| f.exponent + (f.ci_hi - f.ci_lo) >= p && f.ci_lo > 0.0));
    }
}

/// Streaming estimator: replicas are reduced to per-lag structure values as
/// they arrive, so paths need not be held in memory.
#[derive(Debug, Clone)]
pub struct HolderAccumulator {
    direction: Direction,
    lattice: TorusLattice,
    row_dt: f64,
    rows: usize,
    first_row: usize,
    offsets: Vec<usize>,
    lags: Vec<f64>,
    orders: Vec<u32>,
    options: HolderOptions,
    /// `per_replica[r][lag * orders + o]`.
    per_replica: Vec<Vec<f64>>,
}

impl HolderAccumulator {
    pub fn new(
        direction: Direction,
        lags: &[f64],
        orders: &[u32],
        template: &FieldPath,
        options: HolderOptions,
    ) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(invalid("orders", "need at least one positive moment order"));
        }
        let rows = template.rows();
        let horizon = template.horizon();
        let first_row = (0..rows)
            .find(|&i| template.time(i) >= options.window_start * horizon - 1e-12)
            .unwrap_or(rows);
        let unit = match direction {
            Direction::Space => template.lattice.dx(),
            Direction::Time => template.row_dt,
        };
        let min_lag = match direction {
            Direction::Space => options.min_lag_steps * template.lattice.dx(),
            Direction::Time => options.min_lag_steps * template.scheme_dt,
        };
        let mut offsets: Vec<usize> = lags.iter().map(|h| (h / unit).round() as usize).collect();
        offsets.dedup();
        if offsets.len() < 2 {
            return Err(Error::InsufficientGrid("need at least two distinct lags".into()));
        }
        let snapped: Vec<f64> = offsets.iter().map(|&m| m as f64 * unit).collect();
        if snapped.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("lags", "must be increasing"));
        }
        if snapped[0] < min_lag * (1.0 - 1e-9) {
            return Err(invalid("lags", format!("smallest lag {} is below {min_lag}", snapped[0])));
        }
        let span = (snapped[snapped.len() - 1] / snapped[0]).log10();
        if span < MIN_DECADES - 1e-9 {
            return Err(Error::InsufficientGrid(format!("lags span {span:.3} decades, need {MIN_DECADES}")));
        }
        let last = *offsets.last().unwrap_or(&0);
        match direction {
            Direction::Space => {
                if snapped[snapped.len() - 1] > options.lag_cap * (1.0 + 1e-9) {
                    return Err(invalid("lags", format!("spatial lags are capped at {}", options.lag_cap)));
                }
                if last >= template.lattice.points {
                    return Err(invalid("lags", "lag exceeds the torus"));
                }
            }
            Direction::Time => {
                if first_row + last >= rows {
                    return Err(invalid("lags", "temporal lag exceeds the estimation window"));
                }
            }
        }
        Ok(Self {
            direction,
            lattice: template.lattice,
            row_dt: template.row_dt,
            rows,
            first_row,
            offsets,
            lags: snapped,
            orders: orders.to_vec(),
            options,
            per_replica: Vec::new(),
        })
    }

    pub fn lags(&self) -> &[f64] {
        &self.lags
    }

    pub fn replicas(&self) -> usize {
        self.per_replica.len()
    }

    pub fn add(&mut self, path: &FieldPath) -> Result<()> {
        if path.lattice != self.lattice || path.row_dt != self.row_dt || path.rows() != self.rows {
            return Err(invalid("paths", "all paths must share lattice and recording grid"));
        }
        let k = self.orders.len();
        let mut stats = vec![0.0; self.offsets.len() * k];
        let n = self.lattice.len();
        let stride = n / self.lattice.points;
        for (li, &m) in self.offsets.iter().enumerate() {
            let mut acc = vec![0.0; k];
            let mut count = 0usize;
            let mut push = |d: f64| {
                let a = d.abs();
                for (s, &o) in acc.iter_mut().zip(&self.orders) {
                    *s += a.powi(o as i32);
                }
            };
            match self.direction {
                Direction::Space => {
                    let shift = m * stride;
                    for i in self.first_row..self.rows {
                        let row = path.row(i);
                        for j in 0..n {
                            push(row[(j + shift) % n] - row[j]);
                        }
                        count += n;
                    }
                }
                Direction::Time => {
                    for i in self.first_row..self.rows - m {
                        let (a, b) = (path.row(i), path.row(i + m));
                        for j in 0..n {
                            push(b[j] - a[j]);
                        }
                        count += n;
                    }
                }
            }
            for (o, s) in acc.iter().enumerate() {
                stats[li * k + o] = s / count as f64;
            }
        }
        self.per_replica.push(stats);
        Ok(())
    }

    fn exponents(&self, sample: &[usize]) -> Vec<(f64, f64, f64)> {
        let k = self.orders.len();
        let x: Vec<f64> = self.lags.iter().map(|h| h.ln()).collect();
        (0..k)
            .map(|o| {
                let y: Vec<f64> = (0..self.lags.len())
                    .map(|li| {
                        let s: f64 = sample.iter().map(|&r| self.per_replica[r][li * k + o]).sum();
                        (s / sample.len() as f64).ln()
                    })
                    .collect();
                match linear_fit(&x, &y) {
                    Ok(f) => (f.slope / self.orders[o] as f64, f.r_squared, f.slope_stderr),
                    Err(_) => (f64::NAN, 0.0, f64::NAN),
                }
            })
            .collect()
    }

    pub fn finish(&self) -> Result<HolderReport> {
        let r = self.per_replica.len();
        if r < self.options.min_replicas {
            return Err(Error::InsufficientReplicas(format!(
                "{r} replicas, need at least {}",
                self.options.min_replicas
            )));
        }
        let all: Vec<usize> = (0..r).collect();
        let point = self.exponents(&all);
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.bootstrap_seed);
        let mut boot: Vec<Vec<f64>> = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); self.orders.len()];
        let mut sample = vec![0; r];
        for _ in 0..BOOTSTRAP_RESAMPLES {
            for s in sample.iter_mut() {
                *s = rng.random_range(0..r);
            }
            for (b, (e, _, _)) in boot.iter_mut().zip(self.exponents(&sample)) {
                b.push(e);
            }
        }
        let k = self.orders.len();
        let mut fits = Vec::with_capacity(k);
        for (o, &(exponent, r_squared, slope_stderr)) in point.iter().enumerate() {
            if !(r_squared >= MIN_R_SQUARED) {
                return Err(Error::PoorFit {
                    r_squared,
                    threshold: MIN_R_SQUARED,
                });
            }
            let structure = (0..self.lags.len())
                .map(|li| all.iter().map(|&q| self.per_replica[q][li * k + o]).sum::<f64>() / r as f64)
                .collect();
            fits.push(HolderFit {
                order: self.orders[o],
                exponent,
                ci_lo: quantile(&boot[o], 0.025),
                ci_hi: quantile(&boot[o], 0.975),
                r_squared,
                slope_stderr: slope_stderr / self.orders[o] as f64,
                structure,
            });
        }
        let t_hi = (self.rows - 1) as f64 * self.row_dt;
        Ok(HolderReport {
            direction: self.direction,
            lags: self.lags.clone(),
            orders: self.orders.clone(),
            replicas: r,
            window: (self.first_row as f64 * self.row_dt, t_hi),
            fits,
            predicted: None,
            consistent: None,
        })
    }
}

/// Empirical Hölder exponent: regression of `log E|Δu|^{2p}` on the log lag
/// over the window `[T/2, T]`, with a replica bootstrap interval.
pub fn estimate_holder(
    paths: &[FieldPath],
    direction: Direction,
    lags: &[f64],
    orders: &[u32],
    options: HolderOptions,
) -> Result<HolderReport> {
    let first = paths
        .first()
        .ok_or_else(|| Error::InsufficientReplicas("no paths".into()))?;
    let mut acc = HolderAccumulator::new(direction, lags, orders, first, options)?;
    for p in paths {
        acc.add(p)?;
    }
    acc.finish()
}
