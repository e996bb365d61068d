use std::collections::BTreeMap;

use serde::Serialize;

use crate::metrics::{Dataset, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassCounts {
    pub negative: usize,
    pub positive: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.negative + self.positive
    }

    pub fn positive_share(&self) -> Option<f64> {
        (self.total() > 0).then(|| self.positive as f64 / self.total() as f64)
    }

    fn add(&mut self, label: Label) {
        match label {
            Label::Negative => self.negative += 1,
            Label::Positive => self.positive += 1,
        }
    }
}

/// Per-tag and overall class counts.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DatasetStats {
    pub terms: BTreeMap<String, ClassCounts>,
    pub total: ClassCounts,
}

pub fn dataset_stats(dataset: &Dataset) -> DatasetStats {
    let mut stats = DatasetStats::default();
    for ex in dataset.examples() {
        stats.total.add(ex.label);
        for tag in &ex.subgroups {
            stats.terms.entry(tag.clone()).or_default().add(ex.label);
        }
    }
    stats
}
