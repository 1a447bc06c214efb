//! On-disk artifact bundles.
//!
//! A bundle is a directory holding `manifest.json` (game, learned model,
//! solutions, evaluations, metadata) and, when present, `observations.txt`.
//! The observation file is line oriented:
//!
//! ```text
//! twinsgame-observations/1 agents=3 strategies=2 kind=vendor
//! 0 1 1 | 0.5 -1.25 2
//! ```
//!
//! Each data line lists one strategy index per agent, a `|`, then one payoff
//! per agent. Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twinsgame_core::trial::MethodOutcome;
use twinsgame_core::{
    ClusterModel, EquilibriumList, ExperimentConfig, Game, GameDescriptor, GameKind, Observation, ObservationSet,
    PayoffModel, PureProfile,
};

pub const BUNDLE_FORMAT: &str = "twinsgame-bundle/1";
pub const OBSERVATIONS_FORMAT: &str = "twinsgame-observations/1";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const OBSERVATIONS_FILE: &str = "observations.txt";

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("unsupported format {found:?}, expected {expected:?}")]
    Version { found: String, expected: &'static str },
    #[error("observations line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("inconsistent bundle: {0}")]
    Invalid(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BundleError + '_ {
    move |source| BundleError::Io { path: path.to_path_buf(), source }
}

/// Where a bundle came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BundleMeta {
    pub seed: Option<u64>,
    pub setting: Option<usize>,
    pub capacity: Option<f64>,
    pub trial: Option<usize>,
    pub config: Option<ExperimentConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    format: String,
    #[serde(default)]
    meta: BundleMeta,
    #[serde(default)]
    game: Option<Game>,
    #[serde(default)]
    model: Option<ClusterModel>,
    #[serde(default)]
    solutions: BTreeMap<String, EquilibriumList>,
    #[serde(default)]
    evaluations: Vec<MethodOutcome>,
    #[serde(default)]
    error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bundle {
    pub meta: BundleMeta,
    pub game: Option<Game>,
    pub observations: Option<ObservationSet>,
    pub model: Option<ClusterModel>,
    /// Equilibria keyed by method name.
    pub solutions: BTreeMap<String, EquilibriumList>,
    pub evaluations: Vec<MethodOutcome>,
    pub error: Option<String>,
}

impl Bundle {
    /// Cross-checks the parts that are present.
    pub fn validate(&self) -> Result<(), BundleError> {
        let invalid = |e: twinsgame_core::Error| BundleError::Invalid(e.to_string());
        if let Some(g) = &self.game {
            g.validate().map_err(invalid)?;
        }
        if let Some(obs) = &self.observations {
            obs.validate().map_err(invalid)?;
            if let Some(g) = &self.game {
                if g.descriptor() != obs.descriptor {
                    return Err(BundleError::Invalid("observations do not match the game".into()));
                }
            }
        }
        if let Some(m) = &self.model {
            m.validate().map_err(invalid)?;
            let n = self.game.as_ref().map(|g| g.descriptor()).or(self.observations.as_ref().map(|o| o.descriptor));
            if let Some(d) = n {
                if m.clustering.n_agents() != d.n_agents || m.regressors.n_strategies != d.n_strategies {
                    return Err(BundleError::Invalid("model does not match the game".into()));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path) -> Result<(), BundleError> {
        self.validate()?;
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let manifest = Manifest {
            format: BUNDLE_FORMAT.to_string(),
            meta: self.meta.clone(),
            game: self.game.clone(),
            model: self.model.clone(),
            solutions: self.solutions.clone(),
            evaluations: self.evaluations.clone(),
            error: self.error.clone(),
        };
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&manifest).map_err(|source| BundleError::Json { path: path.clone(), source })?;
        fs::write(&path, json + "\n").map_err(io_err(&path))?;
        let obs_path = dir.join(OBSERVATIONS_FILE);
        match &self.observations {
            Some(obs) => fs::write(&obs_path, format_observations(obs)).map_err(io_err(&obs_path))?,
            None if obs_path.exists() => fs::remove_file(&obs_path).map_err(io_err(&obs_path))?,
            None => {}
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, BundleError> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|source| BundleError::Json { path: path.clone(), source })?;
        let found = value.get("format").and_then(|v| v.as_str()).unwrap_or_default();
        if found != BUNDLE_FORMAT {
            return Err(BundleError::Version { found: found.to_string(), expected: BUNDLE_FORMAT });
        }
        let manifest: Manifest =
            serde_json::from_value(value).map_err(|source| BundleError::Json { path: path.clone(), source })?;
        let obs_path = dir.join(OBSERVATIONS_FILE);
        let observations = if obs_path.exists() {
            Some(parse_observations(&fs::read_to_string(&obs_path).map_err(io_err(&obs_path))?)?)
        } else {
            None
        };
        let bundle = Bundle {
            meta: manifest.meta,
            game: manifest.game,
            observations,
            model: manifest.model,
            solutions: manifest.solutions,
            evaluations: manifest.evaluations,
            error: manifest.error,
        };
        bundle.validate()?;
        Ok(bundle)
    }
}

fn kind_name(kind: GameKind) -> &'static str {
    match kind {
        GameKind::Vendor => "vendor",
        GameKind::Santafe => "santafe",
    }
}

pub fn format_observations(obs: &ObservationSet) -> String {
    let d = obs.descriptor;
    let mut out = format!(
        "{OBSERVATIONS_FORMAT} agents={} strategies={} kind={}\n",
        d.n_agents,
        d.n_strategies,
        kind_name(d.kind)
    );
    for o in &obs.observations {
        let strategies: Vec<String> = o.profile.0.iter().map(|s| s.to_string()).collect();
        let payoffs: Vec<String> = o.payoffs.iter().map(|p| format!("{p:?}")).collect();
        let _ = writeln!(out, "{} | {}", strategies.join(" "), payoffs.join(" "));
    }
    out
}

fn parse_header(line: &str, line_no: usize) -> Result<GameDescriptor, BundleError> {
    let err = |message: String| BundleError::Parse { line: line_no, message };
    let mut parts = line.split_whitespace();
    let tag = parts.next().unwrap_or_default();
    if tag != OBSERVATIONS_FORMAT {
        return Err(BundleError::Version { found: tag.to_string(), expected: OBSERVATIONS_FORMAT });
    }
    let (mut agents, mut strategies, mut kind) = (None, None, None);
    for part in parts {
        let (key, value) = part.split_once('=').ok_or_else(|| err(format!("expected key=value, got {part:?}")))?;
        match key {
            "agents" => agents = Some(value.parse::<usize>().map_err(|e| err(format!("agents: {e}")))?),
            "strategies" => strategies = Some(value.parse::<usize>().map_err(|e| err(format!("strategies: {e}")))?),
            "kind" => {
                kind = Some(match value {
                    "vendor" => GameKind::Vendor,
                    "santafe" => GameKind::Santafe,
                    other => return Err(err(format!("unknown game kind {other:?}"))),
                })
            }
            other => return Err(err(format!("unknown header field {other:?}"))),
        }
    }
    match (agents, strategies, kind) {
        (Some(n_agents), Some(n_strategies), Some(kind)) => Ok(GameDescriptor { n_agents, n_strategies, kind }),
        _ => Err(err("header needs agents, strategies and kind".into())),
    }
}

pub fn parse_observations(text: &str) -> Result<ObservationSet, BundleError> {
    let mut descriptor = None;
    let mut observations = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(d) = descriptor else {
            descriptor = Some(parse_header(line, line_no)?);
            continue;
        };
        let err = |message: String| BundleError::Parse { line: line_no, message };
        let (left, right) = line.split_once('|').ok_or_else(|| err("missing '|' separator".into()))?;
        let strategies = left
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| err(format!("strategy {t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let payoffs = right
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| err(format!("payoff {t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if strategies.len() != d.n_agents || payoffs.len() != d.n_agents {
            return Err(err(format!(
                "expected {} strategies and payoffs, found {} and {}",
                d.n_agents,
                strategies.len(),
                payoffs.len()
            )));
        }
        if let Some(s) = strategies.iter().find(|&&s| s >= d.n_strategies) {
            return Err(err(format!("strategy {s} out of range")));
        }
        if payoffs.iter().any(|p| !p.is_finite()) {
            return Err(err("non-finite payoff".into()));
        }
        observations.push(Observation { profile: PureProfile(strategies), payoffs });
    }
    let descriptor = descriptor.ok_or(BundleError::Parse { line: 0, message: "missing header".into() })?;
    let set = ObservationSet { descriptor, observations };
    set.validate().map_err(|e| BundleError::Invalid(e.to_string()))?;
    Ok(set)
}
