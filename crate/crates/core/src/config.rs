//! Application configuration, read from TOML.
//!
//! ```toml
//! output_dir = "out"
//!
//! [solver]
//! executable = "z3"
//! timeout_ms = 10000
//!
//! [client]
//! backend = "scripted"      # or "live", "reference"
//! path = "replay.json"      # file, or directory of <puzzle-id>.json
//!
//! [run]
//! temperature_schedule = [0.0, 0.0001, 0.01]
//! max_actions = 4
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::RunConfig;
use crate::smt::SolverConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("config: {0}")]
    Invalid(String),
}

fn default_live_timeout() -> u64 {
    120_000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClientConfig {
    /// Replays recorded responses: one spec file for every puzzle, or a
    /// directory with one `<puzzle-id>.json` per puzzle.
    Scripted { path: PathBuf },
    /// OpenAI-compatible chat endpoint.
    Live {
        base_url: String,
        model: String,
        /// Environment variable holding the API key.
        #[serde(default)]
        credential_env: Option<String>,
        #[serde(default = "default_live_timeout")]
        timeout_ms: u64,
    },
    /// Answers with the reference encoding of each puzzle.
    Reference,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Dataset used when a command does not name one; the bundled fixtures otherwise.
    #[serde(default)]
    pub dataset: Option<PathBuf>,
    /// Puzzles solved at once in batch mode.
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    pub client: ClientConfig,
    #[serde(default)]
    pub run: RunConfig,
}

fn default_concurrency() -> usize {
    1
}

impl AppConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg: AppConfig = toml::from_str(text)
            .map_err(|e| ConfigError::Parse { path: base.to_path_buf(), message: e.to_string() })?;
        cfg.resolve(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.to_path_buf(), message },
            other => other,
        })
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.output_dir);
        if let Some(d) = &mut self.dataset {
            join(d);
        }
        if let ClientConfig::Scripted { path } = &mut self.client {
            join(path);
        }
        // a bare executable name is looked up on PATH
        if self.solver.executable.components().count() > 1 {
            join(&mut self.solver.executable);
        }
        self.run.solver = self.solver.clone();
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.run.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.concurrency == 0 {
            return Err(ConfigError::Invalid("concurrency must be at least 1".into()));
        }
        if self.solver.timeout_ms == 0 {
            return Err(ConfigError::Invalid("solver timeout must be positive".into()));
        }
        if let ClientConfig::Live { base_url, model, .. } = &self.client {
            if base_url.trim().is_empty() || model.trim().is_empty() {
                return Err(ConfigError::Invalid("live client needs base_url and model".into()));
            }
        }
        Ok(())
    }
}
