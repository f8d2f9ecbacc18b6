//! Experiment configuration files (JSON). Every block rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{Atom, CharacteristicExponent, LevyTriplet};
use crate::noise::SpectralNoiseModel;
use crate::spde::{InitialCondition, ModelSpec, ScalarMap};

fn one() -> f64 {
    1.0
}

fn one_dim() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    Brownian {
        #[serde(default = "one_dim")]
        dim: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Stable {
        #[serde(default = "one_dim")]
        dim: usize,
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Cauchy {
        #[serde(default = "one_dim")]
        dim: usize,
    },
    TemperedStable {
        #[serde(default = "one_dim")]
        dim: usize,
        alpha: f64,
        lambda: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    CompoundPoisson {
        #[serde(default = "one_dim")]
        dim: usize,
        atoms: Vec<Atom>,
    },
    CustomTriplet {
        triplet: LevyTriplet,
    },
}

impl ProcessSpec {
    pub fn build(&self) -> Result<CharacteristicExponent> {
        match self {
            ProcessSpec::Brownian { dim, scale } => CharacteristicExponent::brownian_scaled(*dim, *scale),
            ProcessSpec::Stable { dim, alpha, scale } => CharacteristicExponent::stable_scaled(*dim, *alpha, *scale),
            ProcessSpec::Cauchy { dim } => CharacteristicExponent::cauchy(*dim),
            ProcessSpec::TemperedStable {
                dim,
                alpha,
                lambda,
                scale,
            } => CharacteristicExponent::tempered_stable_scaled(*dim, *alpha, *lambda, *scale),
            ProcessSpec::CompoundPoisson { dim, atoms } => CharacteristicExponent::compound_poisson(*dim, atoms.clone()),
            ProcessSpec::CustomTriplet { triplet } => CharacteristicExponent::from_triplet(triplet.clone()),
        }
    }

    /// `brownian`, `cauchy`, `stable:1.5`, `tempered_stable:1.5:1`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let mut parts = text.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number `{p}` in process `{text}`")))
            })
            .collect::<Result<_>>()?;
        let want = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!("process `{name}` takes {k} parameter(s), got {}", args.len())))
            }
        };
        Ok(match name {
            "brownian" => {
                want(0)?;
                ProcessSpec::Brownian { dim, scale: 1.0 }
            }
            "cauchy" => {
                want(0)?;
                ProcessSpec::Cauchy { dim }
            }
            "stable" => {
                want(1)?;
                ProcessSpec::Stable {
                    dim,
                    alpha: args[0],
                    scale: 1.0,
                }
            }
            "tempered_stable" => {
                want(2)?;
                ProcessSpec::TemperedStable {
                    dim,
                    alpha: args[0],
                    lambda: args[1],
                    scale: 1.0,
                }
            }
            other => return Err(Error::Config(format!("unknown process `{other}`"))),
        })
    }

    pub fn label(&self) -> String {
        match self {
            ProcessSpec::Brownian { .. } => "brownian".into(),
            ProcessSpec::Stable { alpha, .. } => format!("stable:{alpha}"),
            ProcessSpec::Cauchy { .. } => "cauchy".into(),
            ProcessSpec::TemperedStable { alpha, lambda, .. } => format!("tempered_stable:{alpha}:{lambda}"),
            ProcessSpec::CompoundPoisson { .. } => "compound_poisson".into(),
            ProcessSpec::CustomTriplet { .. } => "custom_triplet".into(),
        }
    }
}

/// `white`, `riesz:0.5`, `gaussian:1`, `algebraic:1:1.5`.
pub fn parse_noise(text: &str, dim: usize) -> Result<SpectralNoiseModel> {
    let mut parts = text.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<f64> = parts
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{p}` in noise `{text}`")))
        })
        .collect::<Result<_>>()?;
    let bad = || Error::Config(format!("cannot parse noise `{text}`"));
    let noise = match (name, args.as_slice()) {
        ("white", []) => SpectralNoiseModel::white(dim),
        ("space_time_white", []) => SpectralNoiseModel::space_time_white(dim),
        ("riesz", [b]) => SpectralNoiseModel::riesz(dim, *b),
        ("gaussian", [l]) => SpectralNoiseModel::gaussian(dim, *l),
        ("algebraic", [l, d]) => SpectralNoiseModel::algebraic(dim, *l, *d),
        _ => return Err(bad()),
    };
    noise.map_err(|e| Error::Config(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityBlock {
    pub t: f64,
    #[serde(default)]
    pub grid_halfwidth: Option<f64>,
    #[serde(default)]
    pub dx: Option<f64>,
    #[serde(default)]
    pub derivative: u32,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsBlock {
    pub kappa0: f64,
    pub t_grid: Vec<f64>,
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub replicas: usize,
    #[serde(default = "record_every")]
    pub record_every: usize,
}

fn record_every() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderBlock {
    pub direction: crate::spde::Direction,
    pub orders: Vec<u32>,
    pub lags: Vec<f64>,
    #[serde(default)]
    pub paths_dir: Option<PathBuf>,
    #[serde(default)]
    pub min_replicas: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaBlock {
    #[serde(default = "default_kappa0")]
    pub kappa0: f64,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub step_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub replicas: Option<usize>,
}

fn default_kappa0() -> f64 {
    0.5
}

impl Default for LemmaBlock {
    fn default() -> Self {
        Self {
            kappa0: default_kappa0(),
            t_grid: None,
            step_grid: None,
            replicas: None,
        }
    }
}

/// One experiment. Model keys (`b`, `sigma`, `u0`, `kappa0`) sit at the top
/// level; pipeline parameters live in their own blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    #[serde(default)]
    pub noise: Option<SpectralNoiseModel>,
    #[serde(default)]
    pub b: Option<ScalarMap>,
    #[serde(default)]
    pub sigma: Option<ScalarMap>,
    #[serde(default)]
    pub u0: Option<InitialCondition>,
    #[serde(default)]
    pub kappa0: Option<f64>,
    #[serde(default)]
    pub allow_limit: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit: Vec<EmitFormat>,
    #[serde(default)]
    pub density: Option<DensityBlock>,
    #[serde(default)]
    pub moments: Option<MomentsBlock>,
    #[serde(default)]
    pub simulate: Option<SimulateBlock>,
    #[serde(default)]
    pub holder: Option<HolderBlock>,
    #[serde(default)]
    pub lemma: Option<LemmaBlock>,
}

impl ExperimentConfig {
    pub fn new(process: ProcessSpec) -> Self {
        Self {
            process,
            noise: None,
            b: None,
            sigma: None,
            u0: None,
            kappa0: None,
            allow_limit: false,
            seed: 0,
            output_dir: None,
            emit: Vec::new(),
            density: None,
            moments: None,
            simulate: None,
            holder: None,
            lemma: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        match &self.process {
            ProcessSpec::Brownian { dim, .. }
            | ProcessSpec::Stable { dim, .. }
            | ProcessSpec::Cauchy { dim }
            | ProcessSpec::TemperedStable { dim, .. }
            | ProcessSpec::CompoundPoisson { dim, .. } => *dim,
            ProcessSpec::CustomTriplet { triplet } => triplet.drift.len(),
        }
    }

    pub fn wants(&self, f: EmitFormat) -> bool {
        self.emit.contains(&f)
    }

    /// Additive model unless `b`, `sigma` or `u0` are given.
    pub fn model(&self) -> Result<ModelSpec> {
        let exponent = self.process.build()?;
        let noise = match &self.noise {
            Some(n) => n.clone(),
            None => SpectralNoiseModel::space_time_white(exponent.dim())?,
        };
        let m = ModelSpec::new(
            exponent,
            noise,
            self.b.unwrap_or(ScalarMap::Zero),
            self.sigma.unwrap_or(ScalarMap::Constant { value: 1.0 }),
            self.u0.unwrap_or(InitialCondition::Constant { value: 0.0 }),
        )?;
        match self.kappa0 {
            Some(k) => m.with_kappa0(k),
            None => Ok(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let text = r#"{"process": {"kind": "brownian"}, "sigm": {"kind": "zero"}}"#;
        let err = ExperimentConfig::from_json(text).unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("`sigm`")), "{err}");
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::new(ProcessSpec::parse("tempered_stable:1.5:2", 1).unwrap());
        c.noise = Some(parse_noise("riesz:0.5", 1).unwrap());
        c.sigma = Some(ScalarMap::Linear { lambda: 0.5 });
        c.simulate = Some(SimulateBlock {
            horizon: 1.0,
            dt: 1e-3,
            points: 64,
            length: 8.0,
            replicas: 4,
            record_every: 10,
        });
        c.emit = vec![EmitFormat::Json, EmitFormat::Csv];
        let text = c.to_json().unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn parsing_shorthand() {
        assert!(ProcessSpec::parse("stable", 1).is_err());
        assert!(ProcessSpec::parse("levy", 1).is_err());
        assert_eq!(ProcessSpec::parse("stable:1.5", 2).unwrap().label(), "stable:1.5");
        assert!(parse_noise("algebraic:1", 1).is_err());
        assert_eq!(parse_noise("gaussian:2", 2).unwrap().dim, 2);
    }
}
