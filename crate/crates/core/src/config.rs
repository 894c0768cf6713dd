//! Pipeline configuration: one flat TOML file, relative paths resolved against
//! the file's directory.
//!
//! ```toml
//! kb = "kb.tsv"
//! labels = "labels.tsv"
//! hierarchy = "hierarchy.tsv"
//! embeddings = "embeddings.txt"
//! type_mapping = "type_map.tsv"
//! frame_aliases = "frame_aliases.tsv"
//! alignment_table = "table.json"
//! scorers = ["align", "lexical", "kb", "neural"]
//! theta = 0.1
//! k = 1
//! neural_endpoint = "127.0.0.1:7070"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::AlignmentConfig;
use crate::ds::DsConfig;
use crate::scorers::{ALL_SCORERS, NEURAL};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Toml {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("configuration has no `{0}` path")]
    Missing(&'static str),
    #[error("`{field}` path {path} does not exist")]
    NotFound { field: &'static str, path: PathBuf },
}

fn default_scorers() -> Vec<String> {
    ALL_SCORERS.iter().map(|s| s.to_string()).collect()
}

fn default_timeout() -> u64 {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub kb: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub hierarchy: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub type_mapping: Option<PathBuf>,
    pub frame_aliases: Option<PathBuf>,
    pub alignment_table: Option<PathBuf>,
    #[serde(default = "default_scorers")]
    pub scorers: Vec<String>,
    #[serde(default = "PipelineConfig::default_theta")]
    pub theta: f64,
    #[serde(default = "PipelineConfig::default_min_observations")]
    pub min_observations: usize,
    #[serde(default = "PipelineConfig::default_min_examples")]
    pub min_examples: usize,
    #[serde(default = "PipelineConfig::default_triple_limit")]
    pub triple_limit: usize,
    #[serde(default = "PipelineConfig::default_k")]
    pub k: usize,
    pub neural_endpoint: Option<String>,
    pub neural_stub: Option<PathBuf>,
    #[serde(default = "default_timeout")]
    pub neural_timeout_ms: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config is valid")
    }
}

impl PipelineConfig {
    fn default_theta() -> f64 {
        AlignmentConfig::default().theta
    }
    fn default_min_observations() -> usize {
        AlignmentConfig::default().min_observations
    }
    fn default_min_examples() -> usize {
        DsConfig::default().min_examples
    }
    fn default_triple_limit() -> usize {
        DsConfig::default().triple_limit
    }
    fn default_k() -> usize {
        1
    }

    pub fn parse(body: &str, base: &Path) -> Result<PipelineConfig, ConfigError> {
        let mut cfg: PipelineConfig = toml::from_str(body).map_err(|source| ConfigError::Toml {
            path: base.to_path_buf(),
            source,
        })?;
        for p in [
            &mut cfg.kb,
            &mut cfg.labels,
            &mut cfg.hierarchy,
            &mut cfg.embeddings,
            &mut cfg.type_mapping,
            &mut cfg.frame_aliases,
            &mut cfg.alignment_table,
            &mut cfg.neural_stub,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig, ConfigError> {
        let body = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&body, base)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(ConfigError::Invalid(format!("theta {} is outside (0, 1]", self.theta)));
        }
        if self.triple_limit < 1 {
            return Err(ConfigError::Invalid("triple_limit must be at least 1".into()));
        }
        if self.k < 1 {
            return Err(ConfigError::Invalid("k must be at least 1".into()));
        }
        for s in &self.scorers {
            if !ALL_SCORERS.contains(&s.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "unknown scorer `{s}`, expected one of {}",
                    ALL_SCORERS.join(", ")
                )));
            }
        }
        if self.neural_endpoint.is_some() && self.neural_stub.is_some() {
            return Err(ConfigError::Invalid(
                "neural_endpoint and neural_stub are mutually exclusive".into(),
            ));
        }
        Ok(())
    }

    /// Replaces the scorer list from a comma-separated flag value.
    pub fn set_scorers(&mut self, list: &str) -> Result<(), ConfigError> {
        self.scorers = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        self.validate()
    }

    pub fn scorer_enabled(&self, name: &str) -> bool {
        self.scorers.iter().any(|s| s == name)
    }

    pub fn neural_configured(&self) -> bool {
        self.scorer_enabled(NEURAL) && (self.neural_endpoint.is_some() || self.neural_stub.is_some())
    }

    /// The path behind `field`, which must be set and exist.
    pub fn require(&self, field: &'static str) -> Result<&Path, ConfigError> {
        let p = self.path(field).ok_or(ConfigError::Missing(field))?;
        if !p.exists() {
            return Err(ConfigError::NotFound {
                field,
                path: p.to_path_buf(),
            });
        }
        Ok(p)
    }

    /// The path behind `field` if set; it must then exist.
    pub fn optional(&self, field: &'static str) -> Result<Option<&Path>, ConfigError> {
        match self.path(field) {
            None => Ok(None),
            Some(_) => self.require(field).map(Some),
        }
    }

    fn path(&self, field: &str) -> Option<&Path> {
        match field {
            "kb" => self.kb.as_deref(),
            "labels" => self.labels.as_deref(),
            "hierarchy" => self.hierarchy.as_deref(),
            "embeddings" => self.embeddings.as_deref(),
            "type_mapping" => self.type_mapping.as_deref(),
            "frame_aliases" => self.frame_aliases.as_deref(),
            "alignment_table" => self.alignment_table.as_deref(),
            "neural_stub" => self.neural_stub.as_deref(),
            _ => None,
        }
    }

    pub fn alignment(&self) -> AlignmentConfig {
        AlignmentConfig {
            theta: self.theta,
            min_observations: self.min_observations,
        }
    }

    pub fn ds(&self) -> DsConfig {
        DsConfig {
            min_examples: self.min_examples,
            triple_limit: self.triple_limit,
        }
    }
}
