use std::num::NonZeroUsize;

use rand::seq::index;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{auc_labeled, Dataset, LabeledExample};
use crate::{seed, Error, Result};

/// How many subgroup examples go into a pinned set. Serialized as `"all"` or
/// a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleSize {
    #[default]
    All,
    Count(NonZeroUsize),
}

impl Serialize for SampleSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SampleSize::All => s.serialize_str("all"),
            SampleSize::Count(n) => s.serialize_u64(n.get() as u64),
        }
    }
}

impl<'de> Deserialize<'de> for SampleSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Keyword(String),
        }
        match Raw::deserialize(d)? {
            Raw::Keyword(k) if k == "all" => Ok(SampleSize::All),
            Raw::Count(n) => usize::try_from(n)
                .ok()
                .and_then(NonZeroUsize::new)
                .map(SampleSize::Count)
                .ok_or_else(|| D::Error::custom("sample size must be positive")),
            Raw::Keyword(k) => Err(D::Error::custom(format!(
                "expected \"all\" or a positive integer, got `{k}`"
            ))),
        }
    }
}

/// Sampling rules for the subgroup half `s(D_g)` and the background half
/// `s(D)` of a pinned set. Both halves always have the same size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplePolicy {
    pub subgroup_sample_size: SampleSize,
    pub replacement: bool,
    /// Draw the background half from examples without the subgroup tag only.
    pub background_excludes_subgroup: bool,
    pub seed: u64,
}

impl Default for SamplePolicy {
    /// All of the subgroup, an equal number of background examples drawn
    /// without replacement from the full dataset.
    fn default() -> Self {
        Self {
            subgroup_sample_size: SampleSize::All,
            replacement: false,
            background_excludes_subgroup: false,
            seed: 0,
        }
    }
}

impl SamplePolicy {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Drawn from the subgroup, `s(D_g)`.
    SubgroupSample,
    /// Drawn from the background, `s(D)`.
    BackgroundSample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinnedEntry<'a> {
    pub example: &'a LabeledExample,
    pub origin: Origin,
}

/// The merged sample `s(D_g) + s(D)`, each entry remembering which half it
/// came from. An example may appear in both halves when the background is
/// drawn from the full dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PinnedSet<'a> {
    entries: Vec<PinnedEntry<'a>>,
    subgroup: String,
    seed: u64,
    policy: SamplePolicy,
}

impl<'a> PinnedSet<'a> {
    /// Assembles a pinned set from explicit entries, checking that both halves
    /// have the same size and that every subgroup-sample entry carries the tag.
    pub fn from_entries(
        subgroup: impl Into<String>,
        entries: Vec<PinnedEntry<'a>>,
        policy: SamplePolicy,
    ) -> Result<Self> {
        let subgroup = subgroup.into();
        let from_subgroup = entries
            .iter()
            .filter(|e| e.origin == Origin::SubgroupSample)
            .count();
        if 2 * from_subgroup != entries.len() {
            return Err(Error::InvalidPinnedSet(format!(
                "{} subgroup-sample entries vs {} background-sample entries",
                from_subgroup,
                entries.len() - from_subgroup
            )));
        }
        if let Some(e) = entries
            .iter()
            .find(|e| e.origin == Origin::SubgroupSample && !e.example.has_subgroup(&subgroup))
        {
            return Err(Error::InvalidPinnedSet(format!(
                "subgroup-sample entry `{}` lacks tag `{subgroup}`",
                e.example.id
            )));
        }
        Ok(Self {
            entries,
            subgroup,
            seed: policy.seed,
            policy,
        })
    }

    pub fn entries(&self) -> &[PinnedEntry<'a>] {
        &self.entries
    }

    pub fn subgroup(&self) -> &str {
        &self.subgroup
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn policy(&self) -> &SamplePolicy {
        &self.policy
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, origin: Origin) -> usize {
        self.entries.iter().filter(|e| e.origin == origin).count()
    }
}

/// Draws a pinned set for `subgroup`. Deterministic in `policy.seed`.
pub fn build_pinned_set<'a>(
    dataset: &'a Dataset,
    subgroup: &str,
    policy: &SamplePolicy,
) -> Result<PinnedSet<'a>> {
    let members = dataset
        .subgroup_indices(subgroup)
        .ok_or_else(|| Error::UnknownSubgroup(subgroup.to_string()))?;
    let background: Vec<usize> = if policy.background_excludes_subgroup {
        (0..dataset.len())
            .filter(|&i| !dataset.examples()[i].has_subgroup(subgroup))
            .collect()
    } else {
        (0..dataset.len()).collect()
    };

    let k = match policy.subgroup_sample_size {
        SampleSize::All => members.len(),
        SampleSize::Count(n) => n.get(),
    };
    let mut rng = seed::rng(policy.seed);
    let take_all = policy.subgroup_sample_size == SampleSize::All;
    let subgroup_pick = if take_all {
        members.to_vec()
    } else {
        draw(&mut rng, members, k, policy.replacement)?
    };
    let background_pick = draw(&mut rng, &background, k, policy.replacement)?;

    let examples = dataset.examples();
    let entries = subgroup_pick
        .into_iter()
        .map(|i| PinnedEntry {
            example: &examples[i],
            origin: Origin::SubgroupSample,
        })
        .chain(background_pick.into_iter().map(|i| PinnedEntry {
            example: &examples[i],
            origin: Origin::BackgroundSample,
        }))
        .collect();
    Ok(PinnedSet {
        entries,
        subgroup: subgroup.to_string(),
        seed: policy.seed,
        policy: policy.clone(),
    })
}

fn draw(rng: &mut impl Rng, pool: &[usize], k: usize, replacement: bool) -> Result<Vec<usize>> {
    if (!replacement && k > pool.len()) || (replacement && pool.is_empty()) {
        return Err(Error::UnsatisfiablePolicy {
            requested: k,
            available: pool.len(),
        });
    }
    if replacement {
        Ok((0..k)
            .map(|_| pool[rng.random_range(0..pool.len())])
            .collect())
    } else {
        let mut picked: Vec<usize> = index::sample(rng, pool.len(), k)
            .into_iter()
            .map(|j| pool[j])
            .collect();
        // Dataset order within each half, so entry lists are easy to compare.
        picked.sort_unstable();
        Ok(picked)
    }
}

/// ROC-AUC over every entry of the pinned set, origins ignored.
pub fn pinned_auc(pinned: &PinnedSet<'_>) -> Result<f64> {
    auc_labeled(
        pinned
            .entries
            .iter()
            .map(|e| (e.example.score, e.example.label)),
    )
}
