use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::metrics::{Dataset, Label};
use crate::{seed, Error, Result};

fn default_target() -> Label {
    Label::Negative
}

/// Removes a fraction of one class within one identity term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewSpec {
    pub term: String,
    #[serde(default = "default_target")]
    pub target_label: Label,
    pub removal_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SkewSpec {
    pub fn new(term: impl Into<String>, removal_fraction: f64, seed: u64) -> Self {
        Self {
            term: term.into(),
            target_label: Label::Negative,
            removal_fraction,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    /// Number of examples removed out of `k` candidates: `floor(fraction * k)`.
    pub fn removal_count(&self, k: usize) -> usize {
        (self.removal_fraction * k as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.removal_fraction) {
            return Err(Error::InvalidParameter(format!(
                "removal_fraction {} is outside [0, 1]",
                self.removal_fraction
            )));
        }
        Ok(())
    }
}

/// Drops `floor(fraction * k)` of the `k` examples that carry `term` and have
/// the target label, chosen uniformly without replacement. Everything else is
/// kept in its original order.
pub fn skew_dataset(dataset: &Dataset, skew: &SkewSpec) -> Result<Dataset> {
    skew.validate()?;
    let members = dataset
        .subgroup_indices(&skew.term)
        .ok_or_else(|| Error::UnknownTerm(skew.term.clone()))?;
    let candidates: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&i| dataset.examples()[i].label == skew.target_label)
        .collect();
    let remove = skew.removal_count(candidates.len());
    if remove == 0 {
        return Ok(dataset.clone());
    }
    let mut rng = seed::rng(skew.seed);
    let mut removed = vec![false; dataset.len()];
    for j in index::sample(&mut rng, candidates.len(), remove) {
        removed[candidates[j]] = true;
    }
    Ok(dataset.retain_indexed(|i, _| !removed[i]))
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::metrics::{subgroup_auc, AbsentReason, LabeledExample, MetricValue};

    fn term_dataset(neg: usize, pos: usize) -> Dataset {
        let mut examples = Vec::new();
        for i in 0..neg {
            examples.push(
                LabeledExample::new(format!("n{i}"), 0.3, Label::Negative).with_subgroup("gay"),
            );
        }
        for i in 0..pos {
            examples.push(
                LabeledExample::new(format!("p{i}"), 0.7, Label::Positive).with_subgroup("gay"),
            );
        }
        for i in 0..50 {
            let label = if i % 2 == 0 {
                Label::Negative
            } else {
                Label::Positive
            };
            examples.push(LabeledExample::new(format!("o{i}"), 0.5, label).with_subgroup("white"));
        }
        Dataset::new(examples).unwrap()
    }

    #[test]
    fn half_of_757_negatives() {
        let ds = term_dataset(757, 757);
        let skewed = skew_dataset(&ds, &SkewSpec::new("gay", 0.5, 1)).unwrap();
        let idx = skewed.subgroup_indices("gay").unwrap();
        assert_eq!(idx.len(), 1136);
        assert_eq!(ds.len() - skewed.len(), 378);
        let pos = idx
            .iter()
            .filter(|&&i| skewed.examples()[i].label.is_positive())
            .count();
        assert_eq!(pos, 757);
    }

    #[test]
    fn zero_fraction_is_identity() {
        let ds = term_dataset(10, 10);
        assert_eq!(
            skew_dataset(&ds, &SkewSpec::new("gay", 0.0, 3)).unwrap(),
            ds
        );
    }

    #[test]
    fn full_fraction_empties_the_class() {
        let ds = term_dataset(10, 10);
        let skewed = skew_dataset(&ds, &SkewSpec::new("gay", 1.0, 3)).unwrap();
        assert_eq!(
            subgroup_auc(&skewed, "gay").unwrap(),
            MetricValue::Absent(AbsentReason::EmptyNegativeSide)
        );
    }

    #[test]
    fn only_target_cell_is_touched() {
        let ds = term_dataset(40, 40);
        let skewed = skew_dataset(&ds, &SkewSpec::new("gay", 0.25, 11)).unwrap();
        let kept: HashSet<&str> = skewed.examples().iter().map(|e| e.id.as_str()).collect();
        let removed: Vec<_> = ds
            .examples()
            .iter()
            .filter(|e| !kept.contains(e.id.as_str()))
            .collect();
        assert_eq!(removed.len(), 10);
        assert!(removed
            .iter()
            .all(|e| e.has_subgroup("gay") && e.label == Label::Negative));
    }

    #[test]
    fn seeds_control_the_removal_set() {
        let ds = term_dataset(40, 40);
        let a = skew_dataset(&ds, &SkewSpec::new("gay", 0.5, 1)).unwrap();
        let b = skew_dataset(&ds, &SkewSpec::new("gay", 0.5, 1)).unwrap();
        let c = skew_dataset(&ds, &SkewSpec::new("gay", 0.5, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn errors() {
        let ds = term_dataset(4, 4);
        assert!(matches!(
            skew_dataset(&ds, &SkewSpec::new("x", 0.5, 0)),
            Err(Error::UnknownTerm(_))
        ));
        assert!(matches!(
            skew_dataset(&ds, &SkewSpec::new("gay", 1.5, 0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn target_label_defaults_to_negative() {
        let s: SkewSpec = toml::from_str("term = \"gay\"\nremoval_fraction = 0.5").unwrap();
        assert_eq!(s.target_label, Label::Negative);
        assert_eq!(s.seed, 0);
    }
}
