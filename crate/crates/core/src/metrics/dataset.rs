use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Binary class. `Negative` is the non-toxic class, `Positive` the toxic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Negative => "negative",
            Label::Positive => "positive",
        })
    }
}

/// One scored item.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub id: String,
    pub score: f64,
    pub label: Label,
    pub subgroups: BTreeSet<String>,
    pub text: Option<String>,
}

impl LabeledExample {
    pub fn new(id: impl Into<String>, score: f64, label: Label) -> Self {
        Self {
            id: id.into(),
            score,
            label,
            subgroups: BTreeSet::new(),
            text: None,
        }
    }

    pub fn with_subgroup(mut self, tag: impl Into<String>) -> Self {
        self.subgroups.insert(tag.into());
        self
    }

    pub fn with_subgroups<I, S>(mut self, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.subgroups.extend(tags.into_iter().map(Into::into));
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn has_subgroup(&self, tag: &str) -> bool {
        self.subgroups.contains(tag)
    }
}

pub(crate) fn check_score(score: f64) -> Result<()> {
    if score.is_finite() && (0.0..=1.0).contains(&score) {
        Ok(())
    } else {
        Err(Error::ScoreOutOfRange { score })
    }
}

pub(crate) fn check_tag(tag: &str) -> Result<()> {
    if tag.is_empty() || tag.contains('|') {
        Err(Error::InvalidTag(tag.to_string()))
    } else {
        Ok(())
    }
}

/// An immutable, validated collection of examples with a subgroup index.
///
/// Ids are unique, scores lie in `[0, 1]`, and tags are non-empty and free of
/// the `|` separator used by the csv format.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    by_subgroup: BTreeMap<String, Vec<usize>>,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(examples.len());
        for ex in &examples {
            check_score(ex.score)?;
            for tag in &ex.subgroups {
                check_tag(tag)?;
            }
            if !seen.insert(ex.id.as_str()) {
                return Err(Error::DuplicateId(ex.id.clone()));
            }
        }
        let by_subgroup = index_subgroups(&examples);
        Ok(Self {
            examples,
            by_subgroup,
        })
    }

    /// Builds a dataset from examples already known to satisfy the invariants,
    /// e.g. a subset of a validated dataset.
    pub(crate) fn from_validated(examples: Vec<LabeledExample>) -> Self {
        let by_subgroup = index_subgroups(&examples);
        Self {
            examples,
            by_subgroup,
        }
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn into_examples(self) -> Vec<LabeledExample> {
        self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Indices of the examples carrying `tag`, in dataset order.
    pub fn subgroup_indices(&self, tag: &str) -> Option<&[usize]> {
        self.by_subgroup.get(tag).map(Vec::as_slice)
    }

    pub fn contains_subgroup(&self, tag: &str) -> bool {
        self.by_subgroup.contains_key(tag)
    }

    /// All tags present, in sorted order.
    pub fn subgroups(&self) -> impl Iterator<Item = &str> {
        self.by_subgroup.keys().map(String::as_str)
    }

    /// Replaces every score, keeping all other fields.
    pub fn with_scores(&self, scores: &[f64]) -> Result<Self> {
        if scores.len() != self.examples.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} scores, got {}",
                self.examples.len(),
                scores.len()
            )));
        }
        for &s in scores {
            check_score(s)?;
        }
        let examples = self
            .examples
            .iter()
            .zip(scores)
            .map(|(ex, &score)| LabeledExample {
                score,
                ..ex.clone()
            })
            .collect();
        Ok(Self {
            examples,
            by_subgroup: self.by_subgroup.clone(),
        })
    }

    /// Keeps the examples for which `keep(index, example)` is true.
    pub fn retain_indexed(&self, mut keep: impl FnMut(usize, &LabeledExample) -> bool) -> Self {
        let examples = self
            .examples
            .iter()
            .enumerate()
            .filter(|(i, ex)| keep(*i, ex))
            .map(|(_, ex)| ex.clone())
            .collect();
        Self::from_validated(examples)
    }

    /// Rebuilds the subgroup index from the examples and checks it matches.
    pub fn index_is_consistent(&self) -> bool {
        index_subgroups(&self.examples) == self.by_subgroup
    }
}

fn index_subgroups(examples: &[LabeledExample]) -> BTreeMap<String, Vec<usize>> {
    let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, ex) in examples.iter().enumerate() {
        for tag in &ex.subgroups {
            index.entry(tag.clone()).or_default().push(i);
        }
    }
    index
}
