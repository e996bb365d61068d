use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::metrics::{Dataset, Label};
use crate::{Error, Result};

/// Score distribution of one (class, membership) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScoreDistribution {
    /// Normal on a latent scale, mapped into [0, 1] by the model's squash.
    GaussianOnLatent {
        mean: f64,
        std_dev: f64,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
}

impl ScoreDistribution {
    pub fn gaussian(mean: f64, std_dev: f64) -> Self {
        ScoreDistribution::GaussianOnLatent { mean, std_dev }
    }

    pub fn beta(alpha: f64, beta: f64) -> Self {
        ScoreDistribution::Beta { alpha, beta }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ScoreDistribution::GaussianOnLatent { .. } => "gaussian-on-latent",
            ScoreDistribution::Beta { .. } => "beta",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ScoreDistribution::GaussianOnLatent { mean, std_dev } => {
                mean.is_finite() && std_dev.is_finite() && std_dev > 0.0
            }
            ScoreDistribution::Beta { alpha, beta } => {
                alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid {} parameters: {self:?}",
                self.family()
            )))
        }
    }
}

/// Logistic map from the latent scale into (0, 1). Strictly increasing, so it
/// leaves every rank statistic unchanged.
pub fn squash(latent: f64) -> f64 {
    1.0 / (1.0 + (-latent).exp())
}

fn default_clamp() -> bool {
    true
}

/// A simulated scorer: the score of an example depends only on its label and
/// on whether it carries `subgroup`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreModelSpec {
    pub background_negative: ScoreDistribution,
    pub background_positive: ScoreDistribution,
    pub subgroup_negative: ScoreDistribution,
    pub subgroup_positive: ScoreDistribution,
    pub subgroup: String,
    #[serde(default)]
    pub seed: u64,
    /// `true`: latent gaussians pass through [`squash`]; `false`: they are
    /// clipped into [0, 1].
    #[serde(default = "default_clamp")]
    pub clamp: bool,
}

impl ScoreModelSpec {
    /// Biased scorer shaped like the "same toxicity distribution" column of the
    /// motivating example: subgroup scores sit 3 latent units above the
    /// background for both classes, so subgroup negatives land next to
    /// background positives.
    pub fn column_a(subgroup: impl Into<String>, seed: u64) -> Self {
        Self {
            background_negative: ScoreDistribution::gaussian(-2.0, 1.0),
            background_positive: ScoreDistribution::gaussian(2.0, 1.0),
            subgroup_negative: ScoreDistribution::gaussian(1.0, 1.0),
            subgroup_positive: ScoreDistribution::gaussian(5.0, 1.0),
            subgroup: subgroup.into(),
            seed,
            clamp: true,
        }
    }

    /// Same background as [`column_a`](Self::column_a) with the subgroup
    /// scored exactly like the background.
    pub fn unbiased(subgroup: impl Into<String>, seed: u64) -> Self {
        let biased = Self::column_a(subgroup, seed);
        Self {
            subgroup_negative: biased.background_negative,
            subgroup_positive: biased.background_positive,
            ..biased
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for cell in self.cells() {
            cell.validate()?;
        }
        crate::metrics::check_tag(&self.subgroup)
    }

    pub fn cells(&self) -> [&ScoreDistribution; 4] {
        [
            &self.background_negative,
            &self.background_positive,
            &self.subgroup_negative,
            &self.subgroup_positive,
        ]
    }

    pub fn cell(&self, label: Label, in_subgroup: bool) -> &ScoreDistribution {
        match (in_subgroup, label) {
            (false, Label::Negative) => &self.background_negative,
            (false, Label::Positive) => &self.background_positive,
            (true, Label::Negative) => &self.subgroup_negative,
            (true, Label::Positive) => &self.subgroup_positive,
        }
    }

    fn sample(&self, cell: &ScoreDistribution, rng: &mut ChaCha8Rng) -> f64 {
        match *cell {
            ScoreDistribution::GaussianOnLatent { mean, std_dev } => {
                let latent = Normal::new(mean, std_dev).expect("validated").sample(rng);
                if self.clamp {
                    squash(latent)
                } else {
                    latent.clamp(0.0, 1.0)
                }
            }
            ScoreDistribution::Beta { alpha, beta } => {
                Beta::new(alpha, beta).expect("validated").sample(rng)
            }
        }
    }
}

/// Rescores every example from its cell's distribution.
///
/// Example `i` draws from its own ChaCha stream (`seed`, stream `i`), so a
/// score depends only on the seed and the example's position and the work can
/// be split in any order.
pub fn score_dataset(dataset: &Dataset, model: &ScoreModelSpec) -> Result<Dataset> {
    model.validate()?;
    let scores: Vec<f64> = dataset
        .examples()
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
            rng.set_stream(i as u64);
            model.sample(
                model.cell(ex.label, ex.has_subgroup(&model.subgroup)),
                &mut rng,
            )
        })
        .collect();
    dataset.with_scores(&scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{bnsp_auc, bpsn_auc, subgroup_auc, LabeledExample, MetricValue};

    fn cells_dataset(per_cell: usize) -> Dataset {
        let mut examples = Vec::new();
        for (cell, (label, sub)) in [
            (Label::Negative, false),
            (Label::Positive, false),
            (Label::Negative, true),
            (Label::Positive, true),
        ]
        .into_iter()
        .enumerate()
        {
            for i in 0..per_cell {
                let e = LabeledExample::new(format!("c{cell}-{i}"), 0.0, label);
                examples.push(if sub {
                    e.with_subgroup("g")
                } else {
                    e.with_subgroup("other")
                });
            }
        }
        Dataset::new(examples).unwrap()
    }

    fn value(m: MetricValue) -> f64 {
        m.value().unwrap()
    }

    #[test]
    fn same_seed_same_scores() {
        let ds = cells_dataset(50);
        let model = ScoreModelSpec::column_a("g", 5);
        let a = score_dataset(&ds, &model).unwrap();
        assert_eq!(a, score_dataset(&ds, &model).unwrap());
        let b = score_dataset(&ds, &ScoreModelSpec { seed: 6, ..model }).unwrap();
        assert_ne!(a, b);
        assert!(a.examples().iter().all(|e| (0.0..=1.0).contains(&e.score)));
    }

    #[test]
    fn score_depends_only_on_position() {
        let ds = cells_dataset(20);
        let model = ScoreModelSpec::column_a("g", 1);
        let full = score_dataset(&ds, &model).unwrap();
        // Scoring a prefix gives the same scores for the shared positions.
        let prefix = ds.retain_indexed(|i, _| i < 30);
        let part = score_dataset(&prefix, &model).unwrap();
        for (a, b) in part.examples().iter().zip(full.examples()) {
            assert_eq!(a.score, b.score);
        }
    }

    #[test]
    fn identical_cells_show_no_bias() {
        let ds = cells_dataset(3000);
        let scored = score_dataset(&ds, &ScoreModelSpec::unbiased("g", 3)).unwrap();
        let background = value(subgroup_auc(&scored, "other").unwrap());
        for m in [
            subgroup_auc(&scored, "g"),
            bpsn_auc(&scored, "g"),
            bnsp_auc(&scored, "g"),
        ] {
            assert!((value(m.unwrap()) - background).abs() < 0.01);
        }
    }

    #[test]
    fn shifted_subgroup_lowers_bpsn() {
        let ds = cells_dataset(3000);
        let scored = score_dataset(&ds, &ScoreModelSpec::column_a("g", 3)).unwrap();
        let background = value(subgroup_auc(&scored, "other").unwrap());
        let bpsn = value(bpsn_auc(&scored, "g").unwrap());
        assert!(
            bpsn < background - 0.15,
            "bpsn {bpsn} vs background {background}"
        );
    }

    #[test]
    fn clip_mode_stays_in_range() {
        let ds = cells_dataset(200);
        let model = ScoreModelSpec {
            clamp: false,
            ..ScoreModelSpec::column_a("g", 3)
        };
        let scored = score_dataset(&ds, &model).unwrap();
        assert!(scored
            .examples()
            .iter()
            .all(|e| (0.0..=1.0).contains(&e.score)));
    }

    #[test]
    fn beta_cells_sample_in_range() {
        let ds = cells_dataset(200);
        let b = ScoreDistribution::beta(2.0, 5.0);
        let model = ScoreModelSpec {
            background_negative: b,
            background_positive: ScoreDistribution::beta(5.0, 2.0),
            subgroup_negative: b,
            subgroup_positive: b,
            subgroup: "g".into(),
            seed: 0,
            clamp: true,
        };
        let scored = score_dataset(&ds, &model).unwrap();
        assert!(scored
            .examples()
            .iter()
            .all(|e| (0.0..=1.0).contains(&e.score)));
    }

    #[test]
    fn invalid_parameters() {
        let mut model = ScoreModelSpec::column_a("g", 0);
        model.subgroup_positive = ScoreDistribution::gaussian(0.0, 0.0);
        assert!(score_dataset(&cells_dataset(1), &model).is_err());
        model.subgroup_positive = ScoreDistribution::beta(-1.0, 1.0);
        assert!(model.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let model = ScoreModelSpec::column_a("gay", 17);
        let text = toml::to_string(&model).unwrap();
        assert_eq!(ScoreModelSpec::from_toml_str(&text).unwrap(), model);
        let parsed = ScoreModelSpec::from_toml_str(
            r#"
            subgroup = "gay"
            [background_negative]
            family = "beta"
            alpha = 2.0
            beta = 5.0
            [background_positive]
            family = "gaussian-on-latent"
            mean = 1.0
            std_dev = 0.5
            [subgroup_negative]
            family = "beta"
            alpha = 2.0
            beta = 5.0
            [subgroup_positive]
            family = "beta"
            alpha = 5.0
            beta = 2.0
            "#,
        )
        .unwrap();
        assert!(parsed.clamp);
        assert_eq!(
            parsed.background_negative,
            ScoreDistribution::beta(2.0, 5.0)
        );
    }
}
