//! Run configuration: JSON file, command-line overrides, and resolution into
//! a concrete segment plus run parameters.

use std::fs;
use std::path::{Path, PathBuf};

use dampwave_core::evolution::{mode, random_compatible, random_raw};
use dampwave_core::linalg::Tolerances;
use dampwave_core::models::{build_membrane, build_network, Branch, Coefficient, MembraneSpec, NetworkSpec};
use dampwave_core::{ComplexSegment, State};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segment::read_segment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Network,
    #[value(name = "membrane1d")]
    #[serde(rename = "membrane1d")]
    Membrane1d,
    #[value(name = "membrane2d")]
    #[serde(rename = "membrane2d")]
    Membrane2d,
    SegmentFile,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Network => "network",
            Self::Membrane1d => "membrane1d",
            Self::Membrane2d => "membrane2d",
            Self::SegmentFile => "segment-file",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NetworkConfig {
    UnitLoop,
    Random {
        n_nodes: usize,
        seed: u64,
    },
    /// Branches as `[from, to]` with ground `0`; `inductance` is the full
    /// branch inductance matrix, rows first.
    Explicit {
        n_nodes: usize,
        branches: Vec<[usize; 2]>,
        inductance: Vec<Vec<f64>>,
        resistance: Vec<f64>,
        capacitance: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientConfig {
    Uniform(f64),
    PerElement(Vec<f64>),
}

impl Default for CoefficientConfig {
    fn default() -> Self {
        Self::Uniform(1.0)
    }
}

impl From<&CoefficientConfig> for Coefficient {
    fn from(c: &CoefficientConfig) -> Self {
        match c {
            CoefficientConfig::Uniform(v) => Coefficient::Uniform(*v),
            CoefficientConfig::PerElement(v) => Coefficient::PerElement(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembraneConfig {
    pub n: usize,
    #[serde(default)]
    pub rho0: CoefficientConfig,
    #[serde(default)]
    pub kappa: CoefficientConfig,
    #[serde(default)]
    pub c_damp: CoefficientConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    RandomCompatible {
        #[serde(default)]
        seed: u64,
    },
    RandomRaw {
        #[serde(default)]
        seed: u64,
    },
    Mode {
        index: usize,
    },
    Explicit {
        u: Vec<f64>,
        ustar: Vec<f64>,
    },
}

impl InitialConfig {
    pub fn label(&self) -> String {
        match self {
            Self::RandomCompatible { seed } => format!("random-compatible(seed={seed})"),
            Self::RandomRaw { seed } => format!("random-raw(seed={seed})"),
            Self::Mode { index } => format!("mode({index})"),
            Self::Explicit { .. } => "explicit".into(),
        }
    }

    fn with_seed(self, seed: u64) -> Self {
        match self {
            Self::RandomCompatible { .. } => Self::RandomCompatible { seed },
            Self::RandomRaw { .. } => Self::RandomRaw { seed },
            other => other,
        }
    }

    pub fn generate(&self, seg: &ComplexSegment) -> Result<State> {
        Ok(match self {
            Self::RandomCompatible { seed } => random_compatible(seg, *seed)?,
            Self::RandomRaw { seed } => random_raw(seg, *seed)?,
            Self::Mode { index } => mode(seg, *index)?,
            Self::Explicit { u, ustar } => {
                let s = State::new(u.clone(), ustar.clone());
                seg.check_state(&s)?;
                s
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub kernel: Option<f64>,
    pub compatibility: Option<f64>,
    pub bound_slack: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelKind>,
    pub network: Option<NetworkConfig>,
    pub membrane: Option<MembraneConfig>,
    pub segment_file: Option<PathBuf>,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub initial: Option<InitialConfig>,
    pub delta: Option<f64>,
    pub project_initial: Option<bool>,
    pub tolerances: Option<TolerancesConfig>,
    pub output: Option<OutputConfig>,
}

/// Values given on the command line; each one replaces the config entry.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<ModelKind>,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub project_initial: Option<bool>,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// A config file together with its text, kept for line-anchored messages.
#[derive(Debug, Clone, Default)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub path: Option<PathBuf>,
    text: String,
}

impl LoadedConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let config = serde_json::from_str(text).map_err(|e| Error::json(path, &e))?;
        Ok(Self {
            config,
            path: Some(path.to_owned()),
            text: text.to_owned(),
        })
    }

    /// Error pointing at the first occurrence of `"key"` in the file, or at
    /// the command-line flag when there is no file entry.
    fn invalid(&self, key: &str, flag: Option<&str>, message: String) -> Error {
        let needle = format!("\"{key}\"");
        if let (Some(path), Some(pos)) = (&self.path, self.text.find(&needle)) {
            let before = &self.text[..pos];
            let line = before.matches('\n').count() + 1;
            let column = pos - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            return Error::Parse {
                path: path.clone(),
                line,
                column,
                message,
            };
        }
        match flag {
            Some(f) => Error::Usage(format!("{f}: {message}")),
            None => Error::Usage(message),
        }
    }

    fn relative(&self, p: &Path) -> PathBuf {
        match self.path.as_deref().and_then(Path::parent) {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_owned(),
        }
    }

    /// Applies overrides and builds the segment.
    pub fn resolve(&self, o: &Overrides) -> Result<Resolved> {
        let c = &self.config;
        let model = o
            .model
            .or(c.model)
            .ok_or_else(|| Error::Usage("no model given: pass --model or set \"model\" in the config".into()))?;
        let segment = match model {
            ModelKind::Network => network(c.network.as_ref().unwrap_or(&NetworkConfig::UnitLoop))
                .map_err(|m| self.invalid("network", None, m))?,
            ModelKind::Membrane1d | ModelKind::Membrane2d => {
                let dimension = if model == ModelKind::Membrane1d { 1 } else { 2 };
                let m = c.membrane.as_ref().ok_or_else(|| {
                    self.invalid(
                        "model",
                        Some("--model"),
                        format!("{} needs a \"membrane\" section", model.name()),
                    )
                })?;
                let spec = MembraneSpec {
                    dimension,
                    n: m.n,
                    rho0: (&m.rho0).into(),
                    kappa: (&m.kappa).into(),
                    c_damp: (&m.c_damp).into(),
                };
                build_membrane(&spec).map_err(|e| self.invalid("membrane", None, e.to_string()))?
            }
            ModelKind::SegmentFile => {
                let p = c.segment_file.as_ref().ok_or_else(|| {
                    self.invalid("model", Some("--model"), "segment-file needs \"segment_file\"".into())
                })?;
                read_segment(&self.relative(p))?
            }
        };

        let tau = o.tau.or(c.tau);
        if let Some(t) = tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(self.invalid("tau", Some("--tau"), format!("tau must be positive, got {t}")));
            }
        }
        let mut initial = c.initial.clone().unwrap_or(InitialConfig::RandomCompatible { seed: 0 });
        if let Some(seed) = o.seed {
            initial = initial.with_seed(seed);
        }
        let delta = o.delta.or(c.delta);
        if let Some(d) = delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(self.invalid("delta", Some("--delta"), format!("delta must be positive, got {d}")));
            }
        }
        let mut tolerances = Tolerances::default();
        if let Some(t) = &c.tolerances {
            for (name, value, slot) in [
                ("kernel", t.kernel, &mut tolerances.kernel),
                ("compatibility", t.compatibility, &mut tolerances.compatibility),
                ("bound_slack", t.bound_slack, &mut tolerances.bound_slack),
            ] {
                if let Some(v) = value {
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(self.invalid(name, None, format!("{name} must be a non-negative number")));
                    }
                    *slot = v;
                }
            }
        }
        let output = c.output.clone().unwrap_or_default();
        Ok(Resolved {
            model,
            segment,
            tau,
            steps: o.steps.or(c.steps),
            initial,
            delta,
            project_initial: o.project_initial.or(c.project_initial).unwrap_or(false),
            tolerances,
            csv: o.csv.clone().or_else(|| output.csv.map(|p| self.relative(&p))),
            report: o.report.clone().or_else(|| output.report.map(|p| self.relative(&p))),
        })
    }
}

fn network(cfg: &NetworkConfig) -> std::result::Result<ComplexSegment, String> {
    let spec = match cfg {
        NetworkConfig::UnitLoop => NetworkSpec::unit_loop(),
        NetworkConfig::Random { n_nodes, seed } => {
            if *n_nodes == 0 {
                return Err("random network needs n_nodes >= 1".into());
            }
            NetworkSpec::random(*n_nodes, *seed)
        }
        NetworkConfig::Explicit {
            n_nodes,
            branches,
            inductance,
            resistance,
            capacitance,
        } => {
            let nb = branches.len();
            if inductance.len() != nb || inductance.iter().any(|r| r.len() != nb) {
                return Err(format!("inductance must be {nb}x{nb}"));
            }
            NetworkSpec {
                n_nodes: *n_nodes,
                branches: branches.iter().map(|&[from, to]| Branch { from, to }).collect(),
                inductance: DMatrix::from_fn(nb, nb, |i, j| inductance[i][j]),
                resistance: resistance.clone(),
                capacitance: capacitance.clone(),
            }
        }
    };
    build_network(&spec).map_err(|e| e.to_string())
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub model: ModelKind,
    pub segment: ComplexSegment,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub initial: InitialConfig,
    pub delta: Option<f64>,
    pub project_initial: bool,
    pub tolerances: Tolerances,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}
