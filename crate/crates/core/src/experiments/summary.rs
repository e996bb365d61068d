use std::collections::BTreeMap;

use serde::Serialize;

use crate::datagen::SkewSpec;
use crate::metrics::{AbsentReason, Metric, MetricValue};

/// Mean and spread of one metric over trials. Absent trial values are counted
/// by reason and left out of the moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricStats {
    pub mean: Option<f64>,
    /// Sample standard deviation (n - 1); needs two present values.
    pub std_dev: Option<f64>,
    /// `std_dev / sqrt(count)`.
    pub std_error: Option<f64>,
    /// Trials with a value.
    pub count: usize,
    pub absent: BTreeMap<AbsentReason, usize>,
}

impl MetricStats {
    /// Values are sorted before summation, so any permutation of the input
    /// gives bit-identical statistics.
    pub fn from_values(values: &[MetricValue]) -> Self {
        let mut present: Vec<f64> = values.iter().filter_map(|v| v.value()).collect();
        present.sort_unstable_by(f64::total_cmp);
        let mut absent = BTreeMap::new();
        for r in values.iter().filter_map(|v| v.reason()) {
            *absent.entry(r).or_insert(0) += 1;
        }
        let n = present.len();
        let mean = (n > 0).then(|| present.iter().sum::<f64>() / n as f64);
        let std_dev = match mean {
            Some(m) if n > 1 => {
                let ss: f64 = present.iter().map(|v| (v - m) * (v - m)).sum();
                Some((ss / (n - 1) as f64).sqrt())
            }
            _ => None,
        };
        Self {
            mean,
            std_dev,
            std_error: std_dev.map(|s| s / (n as f64).sqrt()),
            count: n,
            absent,
        }
    }

    /// The mean as a metric value; when no trial had a value, the most
    /// frequent absence reason.
    pub fn as_metric_value(&self) -> MetricValue {
        match self.mean {
            Some(m) => MetricValue::Value(m),
            None => MetricValue::Absent(
                self.absent
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                    .map(|(r, _)| *r)
                    .unwrap_or(AbsentReason::EmptyBothSides),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub subgroup: String,
    pub model: String,
    pub metric: Metric,
    /// Unskewed dataset.
    pub baseline: MetricStats,
    /// Skewed dataset (equal to `baseline` when no skew is configured).
    pub skewed: MetricStats,
}

impl SummaryRow {
    /// `skewed.mean - baseline.mean`.
    pub fn delta(&self) -> Option<f64> {
        Some(self.skewed.mean? - self.baseline.mean?)
    }

    /// Standard error of `delta`, treating the two means as independent.
    pub fn delta_std_error(&self) -> Option<f64> {
        let b = self.baseline.std_error.unwrap_or(0.0);
        let s = self.skewed.std_error?;
        Some(b.hypot(s))
    }
}

/// Per (subgroup, model, metric) statistics over all trials, ordered by
/// subgroup, then model in config order, then metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub master_seed: u64,
    pub skew: Option<SkewSpec>,
    pub models: Vec<String>,
    pub rows: Vec<SummaryRow>,
}

impl TrialSummary {
    pub fn row(&self, subgroup: &str, model: &str, metric: Metric) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.subgroup == subgroup && r.model == model && r.metric == metric)
    }

    pub fn subgroups(&self) -> Vec<&str> {
        let mut tags: Vec<&str> = self.rows.iter().map(|r| r.subgroup.as_str()).collect();
        tags.dedup();
        tags
    }
}
