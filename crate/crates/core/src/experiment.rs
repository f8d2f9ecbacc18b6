//! Pipelines behind the `levyfield` subcommands. Each returns the rendered
//! JSON report, an optional CSV table and whether every checked invariant
//! held.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_value::Value;

use crate::config::{EmitFormat, ExperimentConfig, ProcessSpec};
use crate::density::{
    fit_l1_exponents, fit_sup_envelope, invert_density, l1_increment_space, l1_increment_time, sup_increment_space,
    sup_increment_time, Derivative, IncrementKind, L1BoundParams, Lattice,
};
use crate::error::{Error, Result};
use crate::levy::verify_moment_equivalence;
use crate::moments::{verify_growth, verify_lemma23};
use crate::noise::{compute_indices, dalang_check, verify_lemma31, SpectralNoiseModel, TorusLattice};
use crate::report::{to_json, Report};
use crate::spde::{
    paper_ranges, simulate, Direction, FieldPath, HolderAccumulator, HolderOptions, HolderReport, ModelSpec,
    Simulation,
};
use crate::stats::logspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lemma {
    #[serde(rename = "2.1")]
    L21,
    #[serde(rename = "2.2")]
    L22,
    #[serde(rename = "2.3")]
    L23,
    #[serde(rename = "2.4")]
    L24,
    #[serde(rename = "2.5")]
    L25,
    #[serde(rename = "3.1")]
    L31,
}

impl Lemma {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "2.1" => Lemma::L21,
            "2.2" => Lemma::L22,
            "2.3" => Lemma::L23,
            "2.4" => Lemma::L24,
            "2.5" => Lemma::L25,
            "3.1" => Lemma::L31,
            other => return Err(Error::Config(format!("unknown lemma `{other}`"))),
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            Lemma::L21 => "2.1",
            Lemma::L22 => "2.2",
            Lemma::L23 => "2.3",
            Lemma::L24 => "2.4",
            Lemma::L25 => "2.5",
            Lemma::L31 => "3.1",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: String,
    pub json: String,
    pub csv: Option<String>,
    pub passed: bool,
    pub violations: Vec<String>,
}

impl Outcome {
    fn new<T: Serialize>(command: &str, violations: Vec<String>, result: T, csv: Option<String>) -> Result<Self> {
        let passed = violations.is_empty();
        let json = to_json(&Report {
            command: command.to_string(),
            passed,
            violations: violations.clone(),
            result,
        })?;
        Ok(Self {
            command: command.to_string(),
            json,
            csv,
            passed,
            violations,
        })
    }

    /// Writes `<command>.json`, the CSV when present and a metadata file
    /// holding the wall-clock time.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let stem = self.command.replace(' ', "-");
        let mut written = Vec::new();
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, &self.json)?;
        written.push(json);
        if let Some(csv) = &self.csv {
            let p = dir.join(format!("{stem}.csv"));
            std::fs::write(&p, csv)?;
            written.push(p);
        }
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let meta = dir.join(format!("{stem}.meta.json"));
        std::fs::write(
            &meta,
            format!(
                "{{\n  \"command\": \"{}\",\n  \"unix_time\": {secs},\n  \"version\": \"{}\"\n}}\n",
                self.command,
                env!("CARGO_PKG_VERSION")
            ),
        )?;
        written.push(meta);
        Ok(written)
    }
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_value::to_value(v).unwrap_or(Value::Unit)
}

fn missing(block: &str) -> Error {
    Error::Config(format!("missing `{block}` block"))
}

fn require_noise(config: &ExperimentConfig) -> Result<SpectralNoiseModel> {
    config.noise.clone().ok_or_else(|| Error::Config("missing `noise`".into()))
}

#[derive(Serialize)]
struct DensityResult {
    process: String,
    t: f64,
    dx: f64,
    half_width: f64,
    derivative: u32,
    value_at_origin: f64,
    riemann_mass: f64,
    inversion_tail_error: f64,
    imaginary_residue: f64,
    boundary_mass: f64,
    cutoff: f64,
    invariants_hold: Option<bool>,
    sup_increment_space: Option<Value>,
    l1_increment_space: Option<Value>,
    sup_increment_time: Option<Value>,
    l1_increment_time: Option<Value>,
}

pub fn run_density(config: &ExperimentConfig) -> Result<Outcome> {
    let block = config.density.as_ref().ok_or_else(|| missing("density"))?;
    let e = config.process.build()?;
    let n = e.dim();
    let lattice = match (block.dx, block.grid_halfwidth) {
        (None, None) => Lattice::default_for(&e, block.t)?,
        (dx, hw) => {
            let d = Lattice::default_for(&e, block.t)?;
            Lattice::new(n, dx.unwrap_or(d.dx), hw.unwrap_or(d.half_width))?
        }
    };
    let derivative = Derivative::spatial(n, block.derivative);
    let grid = invert_density(&e, block.t, &lattice, &derivative)?;
    let zero = derivative.is_zero();
    let mut violations = Vec::new();
    let invariants_hold = zero.then(|| grid.satisfies_invariants());
    if invariants_hold == Some(false) {
        violations.push("density.invariants".into());
    }
    let mut h_vec = vec![0.0; n];
    let (mut sup_space, mut l1_space, mut sup_time, mut l1_time) = (None, None, None, None);
    if let Some(h) = block.h {
        h_vec[0] = h;
        sup_space = Some(value(&sup_increment_space(&e, block.t, &h_vec, &derivative, 1.0)?));
        if zero {
            let l1 = l1_increment_space(&e, block.t, &h_vec)?;
            if l1.value > 2.0 {
                violations.push("density.l1_increment_space".into());
            }
            l1_space = Some(value(&l1));
        }
    }
    if let Some(eps) = block.eps {
        sup_time = Some(value(&sup_increment_time(&e, block.t, eps, &derivative, 1.0)?));
        if zero {
            let l1 = l1_increment_time(&e, block.t, eps)?;
            if l1.value > 2.0 {
                violations.push("density.l1_increment_time".into());
            }
            l1_time = Some(value(&l1));
        }
    }
    let csv = if config.wants(EmitFormat::Csv) {
        let mut buf = Vec::new();
        grid.write_csv(&mut buf)?;
        Some(String::from_utf8_lossy(&buf).into_owned())
    } else {
        None
    };
    let result = DensityResult {
        process: config.process.label(),
        t: block.t,
        dx: lattice.dx,
        half_width: lattice.half_width,
        derivative: block.derivative,
        value_at_origin: grid.nearest(&vec![0.0; n]),
        riemann_mass: grid.riemann_mass(),
        inversion_tail_error: grid.inversion_tail_error,
        imaginary_residue: grid.imaginary_residue,
        boundary_mass: grid.boundary_mass,
        cutoff: grid.cutoff,
        invariants_hold,
        sup_increment_space: sup_space,
        l1_increment_space: l1_space,
        sup_increment_time: sup_time,
        l1_increment_time: l1_time,
    };
    Outcome::new("density", violations, result, csv)
}

#[derive(Serialize)]
struct DalangSummary {
    finite: bool,
    value: f64,
}

#[derive(Serialize)]
struct Lemma31Summary {
    positivity_agree: bool,
    values_agree: bool,
    indeterminate: bool,
}

#[derive(Serialize)]
struct IndicesResult {
    process: String,
    noise: String,
    dalang: DalangSummary,
    iota_u: Option<f64>,
    iota_m: Option<f64>,
    iota_l: Option<f64>,
    method: Option<Value>,
    indeterminate: Option<bool>,
    lemma31: Option<Lemma31Summary>,
}

pub fn run_indices(config: &ExperimentConfig) -> Result<Outcome> {
    let e = config.process.build()?;
    let noise = require_noise(config)?;
    let d = dalang_check(&noise, &e)?;
    let mut result = IndicesResult {
        process: config.process.label(),
        noise: noise.name().to_string(),
        dalang: DalangSummary {
            finite: d.finite,
            value: d.value,
        },
        iota_u: None,
        iota_m: None,
        iota_l: None,
        method: None,
        indeterminate: None,
        lemma31: None,
    };
    let mut violations = Vec::new();
    if !d.finite {
        violations.push("dalang".into());
        return Outcome::new("indices", violations, result, None);
    }
    let idx = compute_indices(&noise, &e)?;
    if !idx.ordered() {
        violations.push("indices.ordering".into());
    }
    result.iota_u = Some(idx.iota_u);
    result.iota_m = Some(idx.iota_m);
    result.iota_l = Some(idx.iota_l);
    result.method = Some(value(&idx.method));
    result.indeterminate = Some(idx.indeterminate);
    match verify_lemma31(&noise, &e) {
        Ok(r) => {
            if !r.positivity_agree {
                violations.push("lemma31.positivity".into());
            }
            result.lemma31 = Some(Lemma31Summary {
                positivity_agree: r.positivity_agree,
                values_agree: r.values_agree,
                indeterminate: r.indeterminate,
            });
        }
        Err(Error::AssumptionViolated(_)) => {}
        Err(err) => return Err(err),
    }
    Outcome::new("indices", violations, result, None)
}

pub fn run_dalang(config: &ExperimentConfig) -> Result<Outcome> {
    let e = config.process.build()?;
    let noise = require_noise(config)?;
    let d = dalang_check(&noise, &e)?;
    #[derive(Serialize)]
    struct R {
        process: String,
        noise: String,
        finite: bool,
        value: f64,
        error: f64,
    }
    let r = R {
        process: config.process.label(),
        noise: noise.name().to_string(),
        finite: d.finite,
        value: d.value,
        error: d.error,
    };
    Outcome::new("dalang", Vec::new(), r, None)
}

#[derive(Serialize)]
struct MomentRow {
    t: f64,
    kappa0: f64,
    mc_value: f64,
    mc_stderr: f64,
    integral_bound: f64,
    #[serde(rename = "fitted_C")]
    fitted_c: f64,
}

pub fn run_moments(config: &ExperimentConfig) -> Result<Outcome> {
    let block = config.moments.as_ref().ok_or_else(|| missing("moments"))?;
    let e = config.process.build()?;
    let r = verify_lemma23(&e, block.kappa0, &block.t_grid, block.replicas, config.seed)?;
    #[derive(Serialize)]
    struct R {
        process: String,
        estimates: Vec<MomentRow>,
        #[serde(rename = "fitted_C")]
        fitted_c: f64,
        argmax_t: f64,
        holds: bool,
    }
    let rows = r
        .estimates
        .iter()
        .map(|m| MomentRow {
            t: m.t,
            kappa0: m.kappa0,
            mc_value: m.mc_value,
            mc_stderr: m.mc_stderr,
            integral_bound: m.integral_bound,
            fitted_c: m.fitted_c,
        })
        .collect();
    let violations = if r.holds { Vec::new() } else { vec!["lemma23".into()] };
    let csv = config.wants(EmitFormat::Csv).then(|| {
        let mut s = String::from("t,mc_value,mc_stderr,integral_bound\n");
        for m in &r.estimates {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                m.t, m.mc_value, m.mc_stderr, m.integral_bound
            ));
        }
        s
    });
    let out = R {
        process: config.process.label(),
        estimates: rows,
        fitted_c: r.fitted_c,
        argmax_t: r.argmax_t,
        holds: r.holds,
    };
    Outcome::new("moments", violations, out, csv)
}

fn lattice_of(config: &ExperimentConfig) -> Result<TorusLattice> {
    let s = config.simulate.as_ref().ok_or_else(|| missing("simulate"))?;
    TorusLattice::new(config.dim(), s.points, s.length)
}

/// Runs the model and, with an output directory, stores every replica as
/// `paths/path_<replica>.lvf`.
pub fn run_simulate(config: &ExperimentConfig) -> Result<Outcome> {
    let s = config.simulate.as_ref().ok_or_else(|| missing("simulate"))?;
    let model = config.model()?;
    let lattice = lattice_of(config)?;
    let out = simulate(&model, s.horizon, s.dt, &lattice, s.replicas, config.seed, s.record_every)?;
    if let Some(dir) = &config.output_dir {
        let paths_dir = dir.join("paths");
        std::fs::create_dir_all(&paths_dir)?;
        for p in &out.paths {
            p.save(&paths_dir.join(format!("path_{:06}.lvf", p.replica)))?;
        }
    }
    let last: Vec<f64> = out.paths.iter().flat_map(|p| p.row(p.rows() - 1).to_vec()).collect();
    let finite = out.paths.iter().all(FieldPath::is_finite);
    #[derive(Serialize)]
    struct Sup {
        p: u32,
        value: f64,
    }
    #[derive(Serialize)]
    struct R {
        process: String,
        noise: String,
        replicas: usize,
        rows: usize,
        row_dt: f64,
        dx: f64,
        zero_mode: Value,
        moment_sup: Vec<Sup>,
        final_mean: f64,
        final_variance: f64,
        finite: bool,
    }
    let csv = if config.wants(EmitFormat::Csv) {
        let mut buf = Vec::new();
        if let Some(p) = out.paths.first() {
            p.write_csv(&mut buf)?;
        }
        Some(String::from_utf8_lossy(&buf).into_owned())
    } else {
        None
    };
    let r = R {
        process: config.process.label(),
        noise: model.noise.name().to_string(),
        replicas: out.paths.len(),
        rows: out.paths.first().map_or(0, FieldPath::rows),
        row_dt: s.dt * s.record_every as f64,
        dx: lattice.dx(),
        zero_mode: value(&out.zero_mode),
        moment_sup: out.moment_sup.iter().map(|&(p, value)| Sup { p, value }).collect(),
        final_mean: crate::stats::mean(&last),
        final_variance: crate::stats::variance(&last),
        finite,
    };
    let violations = if finite { Vec::new() } else { vec!["simulate.finite".into()] };
    Outcome::new("simulate", violations, r, csv)
}

fn lvf_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lvf"))
        .collect();
    files.sort();
    Ok(files)
}

/// Estimates Hölder exponents from stored paths, comparing against the
/// admissible range when `kappa0` and a noise are configured.
pub fn run_holder(config: &ExperimentConfig) -> Result<Outcome> {
    let block = config.holder.as_ref().ok_or_else(|| missing("holder"))?;
    let dir = block
        .paths_dir
        .clone()
        .ok_or_else(|| Error::Config("missing `holder.paths_dir`".into()))?;
    let files = lvf_files(&dir)?;
    let first = files
        .first()
        .ok_or_else(|| Error::InsufficientReplicas(format!("no .lvf files in {}", dir.display())))?;
    let template = FieldPath::load(first)?;
    let mut options = HolderOptions::default();
    if let Some(m) = block.min_replicas {
        options.min_replicas = m;
    }
    options.bootstrap_seed = config.seed;
    let mut acc = HolderAccumulator::new(block.direction, &block.lags, &block.orders, &template, options)?;
    for f in &files {
        acc.add(&FieldPath::load(f)?)?;
    }
    let mut report = acc.finish()?;
    let mut violations = Vec::new();
    if let (Some(k0), Some(noise)) = (config.kappa0, &config.noise) {
        let e = config.process.build()?;
        let rho = config.u0.map_or(k0 / 2.0, |u| u.rho().min(k0 / 2.0));
        let range = paper_ranges(&e, noise, k0, rho, config.allow_limit)?;
        report.compare(&range);
    }
    if report.fits.iter().any(|f| f.ci_lo <= 0.0) || report.consistent == Some(false) {
        violations.push(format!("holder.{}", direction_label(block.direction)));
    }
    Outcome::new("holder", violations, report, None)
}

fn direction_label(d: Direction) -> &'static str {
    match d {
        Direction::Space => "space",
        Direction::Time => "time",
    }
}

/// Processes exercised by every lemma check, plus the configured one.
pub fn lemma_catalog(config: &ExperimentConfig) -> Vec<ProcessSpec> {
    let dim = config.dim();
    let mut list = vec![
        ProcessSpec::Cauchy { dim },
        ProcessSpec::Stable {
            dim,
            alpha: 1.5,
            scale: 1.0,
        },
        ProcessSpec::TemperedStable {
            dim,
            alpha: 1.5,
            lambda: 1.0,
            scale: 1.0,
        },
    ];
    if !list.contains(&config.process) {
        list.push(config.process.clone());
    }
    list
}

#[derive(Serialize)]
struct LemmaEntry {
    process: String,
    passed: bool,
    #[serde(rename = "fitted_C")]
    fitted_c: Option<f64>,
    error: Option<String>,
    detail: Value,
}

fn lemma_entry(spec: &ProcessSpec, lemma: Lemma, config: &ExperimentConfig) -> Result<LemmaEntry> {
    let e = spec.build()?;
    let block = config.lemma.clone().unwrap_or_default();
    let k0 = block.kappa0;
    let seed = config.seed;
    let replicas = block.replicas.unwrap_or(20_000);
    let entry = |passed: bool, fitted_c: Option<f64>, detail: Value| LemmaEntry {
        process: spec.label(),
        passed,
        fitted_c,
        error: None,
        detail,
    };
    Ok(match lemma {
        Lemma::L21 => {
            let t_grid = block.t_grid.unwrap_or_else(|| vec![0.1, 0.5, 2.0]);
            let h_grid = block.step_grid.unwrap_or_else(|| logspace(1e-3, 0.5, 4));
            let f = fit_sup_envelope(&e, 0.5, &t_grid, &h_grid, &[0, 1])?;
            entry(f.holds, Some(f.fitted_c), value(&f))
        }
        Lemma::L22 => {
            let r = verify_moment_equivalence(&e, k0)?;
            entry(r.agree, None, value(&r))
        }
        Lemma::L23 => {
            let t_grid = block.t_grid.unwrap_or_else(|| vec![0.25, 0.5, 1.0]);
            let r = verify_lemma23(&e, k0, &t_grid, replicas, seed)?;
            entry(r.holds, Some(r.fitted_c), value(&r))
        }
        Lemma::L24 => {
            let t_grid = block.t_grid.unwrap_or_else(|| logspace(0.01, 1.0, 6));
            let r = verify_growth(&e, k0, &t_grid, 0.49 * k0, replicas, seed)?;
            entry(r.holds && r.fitted_c.is_finite(), Some(r.fitted_c), value(&r))
        }
        Lemma::L25 => {
            let params = L1BoundParams::new(1.0, 0.9, 0.9, 0.24 * k0, k0)?;
            let t_grid = block.t_grid.unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0]);
            let steps = block.step_grid.unwrap_or_else(|| logspace(1e-3, 1.0, 8));
            let space = fit_l1_exponents(&e, &params, IncrementKind::Space, &t_grid, &steps)?;
            let time = fit_l1_exponents(&e, &params, IncrementKind::Time, &t_grid, &steps)?;
            #[derive(Serialize)]
            struct Both<'a> {
                space: &'a crate::density::L1Fit,
                time: &'a crate::density::L1Fit,
            }
            let c = space.fitted_c.max(time.fitted_c);
            entry(
                space.passes && time.passes,
                Some(c),
                value(&Both {
                    space: &space,
                    time: &time,
                }),
            )
        }
        Lemma::L31 => {
            let n = e.dim();
            let noises = [
                SpectralNoiseModel::riesz(n, 0.5)?,
                SpectralNoiseModel::gaussian(n, 1.0)?,
                SpectralNoiseModel::algebraic(n, 1.0, 1.5)?,
            ];
            let reports = noises
                .iter()
                .map(|w| verify_lemma31(w, &e))
                .collect::<Result<Vec<_>>>()?;
            let ok = reports.iter().all(|r| r.positivity_agree && r.indices.ordered());
            entry(ok, None, value(&reports))
        }
    })
}

pub fn run_verify_lemma(config: &ExperimentConfig, lemma: Lemma) -> Result<Outcome> {
    let catalog = lemma_catalog(config);
    let entries: Vec<LemmaEntry> = catalog
        .par_iter()
        .map(|spec| {
            lemma_entry(spec, lemma, config).unwrap_or_else(|err| LemmaEntry {
                process: spec.label(),
                passed: false,
                fitted_c: None,
                error: Some(err.to_string()),
                detail: Value::Unit,
            })
        })
        .collect();
    let violations = entries
        .iter()
        .filter(|e| !e.passed)
        .map(|e| format!("lemma{}/{}", lemma.label(), e.process))
        .collect();
    #[derive(Serialize)]
    struct R {
        lemma: Lemma,
        kappa0: f64,
        entries: Vec<LemmaEntry>,
    }
    let kappa0 = config.lemma.as_ref().map_or(0.5, |b| b.kappa0);
    Outcome::new(
        &format!("verify-lemma-{}", lemma.label()),
        violations,
        R {
            lemma,
            kappa0,
            entries,
        },
        None,
    )
}

/// Heat equation driven by space-time white noise on `[0, 8)`, `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkDesign {
    pub points: usize,
    pub length: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Spacing of stored rows.
    pub row_dt: f64,
    pub replicas: usize,
    pub seed: u64,
    pub spatial_lags: usize,
    pub temporal_lags: (f64, f64, usize),
    pub orders: [u32; 1],
}

impl BenchmarkDesign {
    pub fn standard(dt: f64) -> Self {
        Self {
            points: 1024,
            length: 8.0,
            dt,
            horizon: 1.0,
            row_dt: 0.01,
            replicas: 2000,
            seed: 2024,
            spatial_lags: 16,
            temporal_lags: (0.01, 0.316, 8),
            orders: [2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub dt: f64,
    pub replicas: usize,
    /// Pooled `Var u(T, x)` over sites and replicas.
    pub variance: f64,
    /// Standard error from per-replica spatial means of `u²`.
    pub variance_stderr: f64,
    pub space: HolderReport,
    pub time: HolderReport,
}

/// Streams replicas through the Hölder accumulators in parallel chunks so
/// that only one chunk of paths is held in memory.
pub fn additive_benchmark(design: &BenchmarkDesign) -> Result<BenchmarkResult> {
    let exponent = crate::levy::CharacteristicExponent::brownian(1)?;
    let noise = SpectralNoiseModel::space_time_white(1)?;
    let model = ModelSpec::additive(exponent, noise)?;
    let lattice = TorusLattice::new(1, design.points, design.length)?;
    let record_every = (design.row_dt / design.dt).round() as usize;
    let sim = Simulation::new(&model, lattice, design.horizon, design.dt, record_every)?;
    let space_lags = logspace(4.0 * lattice.dx(), 1.0, design.spatial_lags);
    let (t0, t1, tn) = design.temporal_lags;
    let time_lags = logspace(t0, t1, tn);
    let options = HolderOptions {
        bootstrap_seed: design.seed,
        ..HolderOptions::default()
    };
    let chunk = rayon::current_num_threads().max(1) * 4;
    let mut space: Option<HolderAccumulator> = None;
    let mut time: Option<HolderAccumulator> = None;
    let mut squares = Vec::with_capacity(design.replicas);
    let mut start = 0u64;
    while (start as usize) < design.replicas {
        let end = (start + chunk as u64).min(design.replicas as u64);
        let paths = (start..end)
            .into_par_iter()
            .map(|r| sim.run(design.seed, r))
            .collect::<Result<Vec<_>>>()?;
        for p in &paths {
            if space.is_none() {
                space = Some(HolderAccumulator::new(Direction::Space, &space_lags, &design.orders, p, options)?);
                time = Some(HolderAccumulator::new(Direction::Time, &time_lags, &design.orders, p, options)?);
            }
            space.as_mut().expect("initialised").add(p)?;
            time.as_mut().expect("initialised").add(p)?;
            let last = p.row(p.rows() - 1);
            squares.push(last.iter().map(|v| v * v).sum::<f64>() / last.len() as f64);
        }
        start = end;
    }
    let (space, time) = match (space, time) {
        (Some(s), Some(t)) => (s, t),
        _ => return Err(Error::InsufficientReplicas("no replicas".into())),
    };
    let variance = crate::stats::mean(&squares);
    let variance_stderr = crate::stats::std_dev(&squares) / (squares.len() as f64).sqrt();
    Ok(BenchmarkResult {
        dt: design.dt,
        replicas: design.replicas,
        variance,
        variance_stderr,
        space: space.finish()?,
        time: time.finish()?,
    })
}
