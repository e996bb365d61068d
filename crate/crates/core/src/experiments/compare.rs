use serde::Serialize;

use super::config::ExperimentConfig;
use super::runner::{prepare, run_trials};
use super::summary::TrialSummary;
use crate::metrics::{Metric, MetricValue};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Unskewed dataset.
    Original,
    /// Mean over skewed trials.
    Skewed,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Original => "original",
            Scenario::Skewed => "skewed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub subgroup: String,
    pub metric: Metric,
    pub scenario: Scenario,
    pub model_a: MetricValue,
    pub model_b: MetricValue,
    /// Model B is closer to 1 than model A by more than the improvement threshold.
    pub improved: bool,
}

/// Two models side by side. Subgroups are ordered by the original pinned AUC
/// difference between the models, largest first; within a subgroup rows run
/// scenario-major, then metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub model_a: String,
    pub model_b: String,
    pub improvement_threshold: f64,
    pub selection_threshold: Option<f64>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn subgroups(&self) -> Vec<&str> {
        let mut tags: Vec<&str> = self.rows.iter().map(|r| r.subgroup.as_str()).collect();
        tags.dedup();
        tags
    }

    pub fn row(
        &self,
        subgroup: &str,
        metric: Metric,
        scenario: Scenario,
    ) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.subgroup == subgroup && r.metric == metric && r.scenario == scenario)
    }

    pub fn improved_count(&self) -> usize {
        self.rows.iter().filter(|r| r.improved).count()
    }
}

/// Builds the table from a two-model summary.
///
/// With a selection threshold, only subgroups whose original pinned AUC
/// differs between the models by more than it are kept. The skewed scenario
/// is included only when the summary carries a skew.
pub fn compare_summary(
    summary: &TrialSummary,
    improvement_threshold: f64,
    selection_threshold: Option<f64>,
) -> Result<ComparisonTable> {
    let [model_a, model_b] = summary.models.as_slice() else {
        return Err(Error::Config(format!(
            "comparison needs exactly two models, got {}",
            summary.models.len()
        )));
    };
    let scenarios: &[Scenario] = if summary.skew.is_some() {
        &[Scenario::Original, Scenario::Skewed]
    } else {
        &[Scenario::Original]
    };

    let mut selected: Vec<(&str, f64)> = Vec::new();
    for tag in summary.subgroups() {
        let pinned = |model: &str| {
            summary
                .row(tag, model, Metric::PinnedAuc)
                .and_then(|r| r.baseline.mean)
        };
        let delta = match (pinned(model_a), pinned(model_b)) {
            (Some(a), Some(b)) => (b - a).abs(),
            _ => f64::NAN,
        };
        let keep = match selection_threshold {
            Some(t) => delta > t,
            None => true,
        };
        if keep {
            selected.push((tag, delta));
        }
    }
    // NaN deltas (absent pinned AUC) sort last; ties keep subgroup order.
    selected.sort_by(|x, y| match (x.1.is_nan(), y.1.is_nan()) {
        (false, false) => y.1.total_cmp(&x.1),
        (a, b) => a.cmp(&b),
    });

    let mut rows = Vec::new();
    for (tag, _) in selected {
        for &scenario in scenarios {
            for metric in Metric::ALL {
                let value = |model: &str| {
                    let row = summary
                        .row(tag, model, metric)
                        .expect("summary covers every cell");
                    match scenario {
                        Scenario::Original => row.baseline.as_metric_value(),
                        Scenario::Skewed => row.skewed.as_metric_value(),
                    }
                };
                let (a, b) = (value(model_a), value(model_b));
                let improved = match (a.value(), b.value()) {
                    (Some(a), Some(b)) => b > a + improvement_threshold,
                    _ => false,
                };
                rows.push(ComparisonRow {
                    subgroup: tag.to_string(),
                    metric,
                    scenario,
                    model_a: a,
                    model_b: b,
                    improved,
                });
            }
        }
    }
    Ok(ComparisonTable {
        model_a: model_a.clone(),
        model_b: model_b.clone(),
        improvement_threshold,
        selection_threshold,
        rows,
    })
}

/// Runs the trials (skewed when the config has a skew) and compares the two
/// configured models.
pub fn compare_models(config: &ExperimentConfig) -> Result<ComparisonTable> {
    if config.models.len() != 2 {
        return Err(Error::Config(format!(
            "comparison needs exactly two models, got {}",
            config.models.len()
        )));
    }
    let prepared = prepare(config)?;
    let summary = run_trials(&prepared.models, &prepared.settings)?;
    compare_summary(
        &summary,
        config.improvement_threshold,
        config.selection_threshold,
    )
}
