use crate::client::Endpoint;
use crate::prompt::Task;
use argbind::fol::MatchPolicy;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Query the endpoint, then score.
    Live,
    /// Score an existing generations file.
    Offline,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "live" => Ok(Mode::Live),
            "offline" => Ok(Mode::Offline),
            _ => Err(format!("unknown mode '{s}' (expected live or offline)")),
        }
    }
}

/// Contents of a `run` config file. Relative paths are resolved against
/// the file's directory.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub task: Task,
    pub dataset: PathBuf,
    pub out_dir: PathBuf,
    /// Run name in reports; defaults to the endpoint's model or "offline".
    #[serde(default)]
    pub run_name: Option<String>,
    #[serde(default)]
    pub policy: MatchPolicy,
    /// Vocabulary file; the bundled one when absent.
    #[serde(default)]
    pub vocab: Option<PathBuf>,
    /// Offline mode: raw generations (`{"id", "generation"}` lines).
    #[serde(default)]
    pub generations: Option<PathBuf>,
    #[serde(default)]
    pub endpoint: Option<Endpoint>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("live mode needs an [endpoint] table with base_url and model")]
    MissingEndpoint,
    #[error("offline mode needs a generations file")]
    MissingGenerations,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")))
            .map_err(|source| ConfigError::Toml { path: path.to_path_buf(), source })
    }

    /// Parses TOML text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, toml::de::Error> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.dataset);
        resolve(&mut cfg.out_dir);
        cfg.vocab.as_mut().map(resolve);
        cfg.generations.as_mut().map(resolve);
        Ok(cfg)
    }

    /// Checks that the mode has what it needs.
    pub fn check(&self) -> Result<(), ConfigError> {
        match self.mode {
            Mode::Live if self.endpoint.is_none() => Err(ConfigError::MissingEndpoint),
            Mode::Offline if self.generations.is_none() => Err(ConfigError::MissingGenerations),
            _ => Ok(()),
        }
    }

    pub fn run_name(&self) -> String {
        self.run_name.clone().unwrap_or_else(|| match (&self.mode, &self.endpoint) {
            (Mode::Live, Some(ep)) => ep.model.clone(),
            _ => "offline".to_string(),
        })
    }
}
