use rayon::prelude::*;

use super::config::{DatasetSource, ExperimentConfig, ModelKind};
use super::summary::{MetricStats, SummaryRow, TrialSummary};
use crate::datagen::{generate_synthetic, skew_dataset, SkewSpec, TemplateSpec};
use crate::io::{load_dataset_with, score_remote, LoadOptions};
use crate::metrics::{
    bias_report, build_pinned_set, pinned_auc, Dataset, Metric, MetricValue, SamplePolicy,
};
use crate::simscore::score_dataset;
use crate::{seed, Error, Result};

const SKEW_STREAM: u64 = 1;
const PINNED_STREAM: u64 = 2;

/// A dataset scored by one model.
#[derive(Debug, Clone)]
pub struct ScoredModel {
    pub name: String,
    pub dataset: Dataset,
}

#[derive(Debug, Clone)]
pub struct TrialSettings {
    pub skew: Option<SkewSpec>,
    pub trials: usize,
    pub subgroups: Vec<String>,
    pub master_seed: u64,
    pub policy: SamplePolicy,
}

impl TrialSettings {
    fn trial_seed(&self, trial: usize, stream: u64) -> u64 {
        seed::derive(seed::derive(self.master_seed, trial as u64), stream)
    }
}

/// Models scored and settings resolved from a config.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub models: Vec<ScoredModel>,
    pub settings: TrialSettings,
}

/// Builds or loads the dataset, scores it with every model and resolves the
/// subgroup list.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let base = match &config.dataset {
        DatasetSource::Generated {
            templates,
            per_term_target,
            identity_terms,
        } => {
            let mut spec = match templates {
                Some(path) => TemplateSpec::from_path(path)?,
                None => TemplateSpec::default_corpus(),
            };
            if let Some(target) = per_term_target {
                spec = spec.with_per_term_target(*target)?;
            }
            if let Some(terms) = identity_terms {
                spec = spec.with_identity_terms(terms.clone())?;
            }
            generate_synthetic(&spec)
        }
        DatasetSource::File { path, format } => load_dataset_with(
            path,
            *format,
            LoadOptions {
                require_scores: false,
            },
        )?,
    };

    let mut models = Vec::with_capacity(config.models.len());
    for m in &config.models {
        let dataset = match &m.kind {
            ModelKind::Simulated(spec) => score_dataset(&base, spec)?,
            ModelKind::Remote(remote) => {
                let texts: Vec<&str> = base
                    .examples()
                    .iter()
                    .map(|e| e.text.as_deref().unwrap_or(""))
                    .collect();
                let scores = score_remote(&texts, remote)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| r.map_err(|e| Error::Remote(format!("item {i}: {e}"))))
                    .collect::<Result<Vec<f64>>>()?;
                base.with_scores(&scores)?
            }
        };
        models.push(ScoredModel {
            name: m.name.clone(),
            dataset,
        });
    }

    let subgroups = if config.subgroups.is_empty() {
        base.subgroups().map(str::to_string).collect()
    } else {
        config.subgroups.clone()
    };
    Ok(Prepared {
        models,
        settings: TrialSettings {
            skew: config.skew.clone(),
            trials: config.trials,
            subgroups,
            master_seed: config.master_seed,
            policy: config.policy.clone(),
        },
    })
}

/// Values of one trial: `[model][subgroup][metric]`.
type TrialValues = Vec<Vec<[MetricValue; 4]>>;

struct TrialOutcome {
    skewed: TrialValues,
    /// Pinned AUC on the unskewed data with this trial's pinned seed.
    baseline_pinned: Vec<Vec<MetricValue>>,
}

/// Runs the trials and aggregates them.
///
/// Robust metrics on the unskewed data are deterministic and computed once.
/// The baseline pinned AUC uses the same per-trial pinned seeds as the skewed
/// runs, so baseline and skewed carry the same sampling noise.
pub fn run_trials(models: &[ScoredModel], settings: &TrialSettings) -> Result<TrialSummary> {
    if settings.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let baseline_reports = models
        .iter()
        .map(|m| bias_report(&m.dataset, &settings.subgroups, &settings.policy))
        .collect::<Result<Vec<_>>>()?;

    let outcomes = (0..settings.trials)
        .into_par_iter()
        .map(|trial| run_one(models, settings, trial))
        .collect::<Result<Vec<TrialOutcome>>>()?;

    let mut rows = Vec::new();
    for (s, subgroup) in settings.subgroups.iter().enumerate() {
        for (m, model) in models.iter().enumerate() {
            for (k, metric) in Metric::ALL.into_iter().enumerate() {
                let skewed: Vec<MetricValue> = outcomes.iter().map(|o| o.skewed[m][s][k]).collect();
                let baseline: Vec<MetricValue> = if metric == Metric::PinnedAuc {
                    outcomes.iter().map(|o| o.baseline_pinned[m][s]).collect()
                } else {
                    vec![baseline_reports[m][s].get(metric); settings.trials]
                };
                rows.push(SummaryRow {
                    subgroup: subgroup.clone(),
                    model: model.name.clone(),
                    metric,
                    baseline: MetricStats::from_values(&baseline),
                    skewed: MetricStats::from_values(&skewed),
                });
            }
        }
    }
    Ok(TrialSummary {
        trials: settings.trials,
        master_seed: settings.master_seed,
        skew: settings.skew.clone(),
        models: models.iter().map(|m| m.name.clone()).collect(),
        rows,
    })
}

fn run_one(models: &[ScoredModel], settings: &TrialSettings, trial: usize) -> Result<TrialOutcome> {
    let policy = settings
        .policy
        .with_seed(settings.trial_seed(trial, PINNED_STREAM));
    let mut skewed = Vec::with_capacity(models.len());
    let mut baseline_pinned = Vec::with_capacity(models.len());
    for model in models {
        let data = match &settings.skew {
            Some(skew) => skew_dataset(
                &model.dataset,
                &skew.with_seed(settings.trial_seed(trial, SKEW_STREAM)),
            )?,
            None => model.dataset.clone(),
        };
        let report = bias_report(&data, &settings.subgroups, &policy)?;
        skewed.push(
            report
                .iter()
                .map(|r| Metric::ALL.map(|m| r.get(m)))
                .collect(),
        );

        baseline_pinned.push(
            settings
                .subgroups
                .iter()
                .map(|tag| {
                    let tag_policy = policy.with_seed(seed::derive_str(policy.seed, tag));
                    let value = build_pinned_set(&model.dataset, tag, &tag_policy)
                        .and_then(|p| pinned_auc(&p));
                    MetricValue::from_result(value)
                })
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(TrialOutcome {
        skewed,
        baseline_pinned,
    })
}

/// [`prepare`] then [`run_trials`]; requires a skew.
pub fn run_skew_experiment(config: &ExperimentConfig) -> Result<TrialSummary> {
    if config.skew.is_none() {
        return Err(Error::Config(
            "skew experiment needs a [skew] section".into(),
        ));
    }
    let prepared = prepare(config)?;
    run_trials(&prepared.models, &prepared.settings)
}
