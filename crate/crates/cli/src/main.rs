use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levyfield::config::{
    parse_noise, DensityBlock, EmitFormat, ExperimentConfig, HolderBlock, LemmaBlock, MomentsBlock, ProcessSpec,
    SimulateBlock,
};
use levyfield::experiment::{self, Lemma, Outcome};
use levyfield::spde::{Direction, FieldPath};
use levyfield::stats::logspace;
use levyfield::Error;

#[derive(Parser)]
#[command(name = "levyfield", version, about = "Lévy-driven heat equation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment file (JSON); flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `brownian`, `cauchy`, `stable:<alpha>` or `tempered_stable:<alpha>:<lambda>`.
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    emit: Vec<Emit>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Space,
    Time,
}

#[derive(Subcommand)]
enum Command {
    /// Transition density on a lattice, with optional increments.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        grid_halfwidth: Option<f64>,
        #[arg(long)]
        dx: Option<f64>,
        #[arg(long)]
        derivative: Option<u32>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Fractal indices of a noise against a process.
    Indices {
        #[command(flatten)]
        common: Common,
        /// `white`, `riesz:<b>`, `gaussian:<l>` or `algebraic:<l>:<d>`.
        #[arg(long)]
        noise: Option<String>,
    },
    /// Dalang integral.
    Dalang {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        noise: Option<String>,
    },
    /// Fractional moments against the integral bound.
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kappa0: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        t_grid: Vec<f64>,
        #[arg(long)]
        replicas: Option<usize>,
    },
    /// Mild-solution paths of the stochastic heat equation.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Model file naming process, noise, b, sigma and u0.
        #[arg(long)]
        model_config: Option<PathBuf>,
        #[arg(long = "T")]
        horizon: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "N")]
        points: Option<usize>,
        #[arg(long = "L")]
        length: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        record_every: Option<usize>,
    },
    /// Hölder exponents from stored paths.
    Holder {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        paths_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        direction: Option<Dir>,
        #[arg(long, value_delimiter = ',')]
        orders: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        lags: Vec<f64>,
        #[arg(long)]
        min_replicas: Option<usize>,
    },
    /// Numerical check of one lemma over the process catalog.
    VerifyLemma {
        /// 2.1, 2.2, 2.3, 2.4, 2.5 or 3.1.
        lemma: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kappa0: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
    },
}

fn base_config(common: &Common, extra: Option<&PathBuf>) -> Result<ExperimentConfig, Error> {
    let path = extra.or(common.config.as_ref());
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => {
            let name = common.process.as_deref().unwrap_or("brownian");
            ExperimentConfig::new(ProcessSpec::parse(name, common.dim.unwrap_or(1))?)
        }
    };
    if path.is_some() {
        if let Some(name) = &common.process {
            cfg.process = ProcessSpec::parse(name, common.dim.unwrap_or_else(|| cfg.dim()))?;
        }
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.output_dir = Some(o.clone());
    }
    if !common.emit.is_empty() {
        cfg.emit = common
            .emit
            .iter()
            .map(|e| match e {
                Emit::Json => EmitFormat::Json,
                Emit::Csv => EmitFormat::Csv,
            })
            .collect();
    }
    Ok(cfg)
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::Config(format!("missing --{flag}")))
}

fn default_lags(direction: Direction, dir: &PathBuf) -> Result<Vec<f64>, Error> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lvf"))
        .collect();
    files.sort();
    let first = files
        .first()
        .ok_or_else(|| Error::InsufficientReplicas(format!("no .lvf files in {}", dir.display())))?;
    let p = FieldPath::load(first)?;
    Ok(match direction {
        Direction::Space => logspace(4.0 * p.lattice.dx(), 1.0f64.min(p.lattice.length / 2.0), 16),
        Direction::Time => logspace(4.0 * p.row_dt, 0.316 * p.horizon(), 8),
    })
}

fn execute(command: Command) -> Result<(Outcome, ExperimentConfig), Error> {
    match command {
        Command::Density {
            common,
            t,
            grid_halfwidth,
            dx,
            derivative,
            h,
            eps,
        } => {
            let mut cfg = base_config(&common, None)?;
            let mut block = cfg.density.clone().unwrap_or(DensityBlock {
                t: 1.0,
                grid_halfwidth: None,
                dx: None,
                derivative: 0,
                h: None,
                eps: None,
            });
            block.t = t.unwrap_or(block.t);
            block.grid_halfwidth = grid_halfwidth.or(block.grid_halfwidth);
            block.dx = dx.or(block.dx);
            block.derivative = derivative.unwrap_or(block.derivative);
            block.h = h.or(block.h);
            block.eps = eps.or(block.eps);
            cfg.density = Some(block);
            Ok((experiment::run_density(&cfg)?, cfg))
        }
        Command::Indices { common, noise } => {
            let cfg = with_noise(&common, noise)?;
            Ok((experiment::run_indices(&cfg)?, cfg))
        }
        Command::Dalang { common, noise } => {
            let cfg = with_noise(&common, noise)?;
            Ok((experiment::run_dalang(&cfg)?, cfg))
        }
        Command::Moments {
            common,
            kappa0,
            t_grid,
            replicas,
        } => {
            let mut cfg = base_config(&common, None)?;
            let block = match cfg.moments.clone() {
                Some(mut b) => {
                    b.kappa0 = kappa0.unwrap_or(b.kappa0);
                    if !t_grid.is_empty() {
                        b.t_grid = t_grid;
                    }
                    b.replicas = replicas.unwrap_or(b.replicas);
                    b
                }
                None => MomentsBlock {
                    kappa0: need(kappa0, "kappa0")?,
                    t_grid: if t_grid.is_empty() { vec![0.25, 0.5, 1.0] } else { t_grid },
                    replicas: replicas.unwrap_or(100_000),
                },
            };
            cfg.moments = Some(block);
            Ok((experiment::run_moments(&cfg)?, cfg))
        }
        Command::Simulate {
            common,
            model_config,
            horizon,
            dt,
            points,
            length,
            replicas,
            record_every,
        } => {
            let mut cfg = base_config(&common, model_config.as_ref())?;
            let block = match cfg.simulate.clone() {
                Some(b) => SimulateBlock {
                    horizon: horizon.unwrap_or(b.horizon),
                    dt: dt.unwrap_or(b.dt),
                    points: points.unwrap_or(b.points),
                    length: length.unwrap_or(b.length),
                    replicas: replicas.unwrap_or(b.replicas),
                    record_every: record_every.unwrap_or(b.record_every),
                },
                None => SimulateBlock {
                    horizon: need(horizon, "T")?,
                    dt: need(dt, "dt")?,
                    points: need(points, "N")?,
                    length: need(length, "L")?,
                    replicas: replicas.unwrap_or(1),
                    record_every: record_every.unwrap_or(1),
                },
            };
            cfg.simulate = Some(block);
            Ok((experiment::run_simulate(&cfg)?, cfg))
        }
        Command::Holder {
            common,
            paths_dir,
            direction,
            orders,
            lags,
            min_replicas,
        } => {
            let mut cfg = base_config(&common, None)?;
            let prior = cfg.holder.clone();
            let direction = match direction {
                Some(Dir::Space) => Direction::Space,
                Some(Dir::Time) => Direction::Time,
                None => prior.as_ref().map(|b| b.direction).ok_or_else(|| Error::Config("missing --direction".into()))?,
            };
            let paths_dir = need(paths_dir.or_else(|| prior.as_ref().and_then(|b| b.paths_dir.clone())), "paths-dir")?;
            let orders = if orders.is_empty() {
                prior.as_ref().map_or(vec![2], |b| b.orders.clone())
            } else {
                orders
            };
            let lags = if !lags.is_empty() {
                lags
            } else if let Some(b) = prior.as_ref().filter(|b| !b.lags.is_empty() && b.direction == direction) {
                b.lags.clone()
            } else {
                default_lags(direction, &paths_dir)?
            };
            cfg.holder = Some(HolderBlock {
                direction,
                orders,
                lags,
                paths_dir: Some(paths_dir),
                min_replicas: min_replicas.or(prior.and_then(|b| b.min_replicas)),
            });
            Ok((experiment::run_holder(&cfg)?, cfg))
        }
        Command::VerifyLemma {
            lemma,
            common,
            kappa0,
            replicas,
        } => {
            let lemma = Lemma::parse(&lemma)?;
            let mut cfg = base_config(&common, None)?;
            let mut block = cfg.lemma.clone().unwrap_or_else(LemmaBlock::default);
            if let Some(k) = kappa0 {
                block.kappa0 = k;
            }
            if replicas.is_some() {
                block.replicas = replicas;
            }
            cfg.lemma = Some(block);
            Ok((experiment::run_verify_lemma(&cfg, lemma)?, cfg))
        }
    }
}

fn with_noise(common: &Common, noise: Option<String>) -> Result<ExperimentConfig, Error> {
    let mut cfg = base_config(common, None)?;
    if let Some(text) = noise {
        cfg.noise = Some(parse_noise(&text, cfg.dim())?);
    }
    Ok(cfg)
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_) | Error::InvalidParameter { .. } | Error::DimensionMismatch { .. } | Error::Unsupported(_)
    )
}

fn init_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("LEVYFIELD_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("LEVYFIELD_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Config("LEVYFIELD_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (outcome, cfg) = match execute(cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_config_error(&e) { 2 } else { 1 });
        }
    };
    if let Some(dir) = &cfg.output_dir {
        if let Err(e) = outcome.write(dir) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let csv_only = cfg.emit == [EmitFormat::Csv];
    match (&outcome.csv, csv_only) {
        (Some(csv), true) if cfg.output_dir.is_none() => print!("{csv}"),
        _ => print!("{}", outcome.json),
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("violations: {}", outcome.violations.join(", "));
        ExitCode::from(1)
    }
}
