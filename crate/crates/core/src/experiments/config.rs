use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datagen::{PerTermTarget, SkewSpec, REFERENCE_TERMS};
use crate::io::{DataFormat, RemoteScorerConfig};
use crate::metrics::SamplePolicy;
use crate::simscore::ScoreModelSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatasetSource {
    /// Template corpus; the shipped default when `templates` is unset.
    Generated {
        #[serde(default)]
        templates: Option<PathBuf>,
        #[serde(default)]
        per_term_target: Option<PerTermTarget>,
        #[serde(default)]
        identity_terms: Option<Vec<String>>,
    },
    /// An ingested file. Existing scores are ignored; models rescore it.
    File { path: PathBuf, format: DataFormat },
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Generated {
            templates: None,
            per_term_target: None,
            identity_terms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Simulated(ScoreModelSpec),
    Remote(RemoteScorerConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    #[serde(flatten)]
    pub kind: ModelKind,
}

fn default_trials() -> usize {
    100
}

/// Experiment config file (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub dataset: DatasetSource,
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub skew: Option<SkewSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Tags to report; empty means every tag in the dataset.
    #[serde(default)]
    pub subgroups: Vec<String>,
    #[serde(default)]
    pub master_seed: u64,
    /// Sampling rules for pinned sets. The seed is replaced per trial.
    #[serde(default)]
    pub policy: SamplePolicy,
    /// Model B counts as improved when its metric beats model A's by more
    /// than this.
    #[serde(default)]
    pub improvement_threshold: f64,
    /// Keep only subgroups whose original pinned AUC differs between the two
    /// models by more than this.
    #[serde(default)]
    pub selection_threshold: Option<f64>,
}

impl ExperimentConfig {
    /// A biased model (`column_a`) against a mitigated one (`unbiased`) on the
    /// default templates restricted to [`REFERENCE_TERMS`] plus `term`, with
    /// `term` skewed by half and 100 trials.
    pub fn biased_vs_mitigated(term: &str, master_seed: u64) -> Self {
        let mut terms: Vec<String> = REFERENCE_TERMS.iter().map(|t| t.to_string()).collect();
        if !terms.iter().any(|t| t == term) {
            terms.push(term.to_string());
        }
        Self {
            dataset: DatasetSource::Generated {
                templates: None,
                per_term_target: None,
                identity_terms: Some(terms),
            },
            models: vec![
                ModelConfig {
                    name: "biased".into(),
                    kind: ModelKind::Simulated(ScoreModelSpec::column_a(term, 1)),
                },
                ModelConfig {
                    name: "mitigated".into(),
                    kind: ModelKind::Simulated(ScoreModelSpec::unbiased(term, 1)),
                },
            ],
            skew: Some(SkewSpec::new(term, 0.5, 0)),
            trials: default_trials(),
            subgroups: Vec::new(),
            master_seed,
            policy: SamplePolicy::default(),
            improvement_threshold: 0.0,
            selection_threshold: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file; relative paths inside it are resolved against the
    /// file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        match &mut self.dataset {
            DatasetSource::Generated {
                templates: Some(p), ..
            } => fix(p),
            DatasetSource::File { path, .. } => fix(path),
            DatasetSource::Generated { .. } => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("at least one model is required".into()));
        }
        let mut names: Vec<&str> = self.models.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("model names must be unique".into()));
        }
        if let Some(skew) = &self.skew {
            skew.validate()?;
        }
        for m in &self.models {
            match &m.kind {
                ModelKind::Simulated(spec) => spec.validate()?,
                ModelKind::Remote(remote) => remote.validate()?,
            }
        }
        Ok(())
    }
}
