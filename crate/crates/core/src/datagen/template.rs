use std::collections::HashSet;
use std::num::NonZeroUsize;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::metrics::{Dataset, Label, LabeledExample};
use crate::{Error, Result};

/// Identity-term slot in a template pattern.
pub const TERM_SLOT: &str = "{term}";
/// Filler slot in a frame pattern of a template file.
pub const WORD_SLOT: &str = "{word}";

const DEFAULT_CORPUS: &str = include_str!("../../data/default_templates.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub pattern: String,
    pub label: Label,
}

impl Template {
    pub fn new(pattern: impl Into<String>, label: Label) -> Self {
        Self {
            pattern: pattern.into(),
            label,
        }
    }

    pub fn instantiate(&self, term: &str) -> String {
        self.pattern.replacen(TERM_SLOT, term, 1)
    }
}

/// Examples generated per identity term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerTermTarget {
    /// Every template once per term.
    #[default]
    AllCombinations,
    /// Exactly this many per term, half of each label. Must be even.
    Count(NonZeroUsize),
}

impl Serialize for PerTermTarget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PerTermTarget::AllCombinations => s.serialize_str("all"),
            PerTermTarget::Count(n) => s.serialize_u64(n.get() as u64),
        }
    }
}

impl<'de> Deserialize<'de> for PerTermTarget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Keyword(String),
        }
        match Raw::deserialize(d)? {
            Raw::Keyword(k) if k == "all" => Ok(PerTermTarget::AllCombinations),
            Raw::Count(n) => usize::try_from(n)
                .ok()
                .and_then(NonZeroUsize::new)
                .map(PerTermTarget::Count)
                .ok_or_else(|| D::Error::custom("per_term_target must be positive")),
            Raw::Keyword(k) => Err(D::Error::custom(format!(
                "expected \"all\" or a count, got `{k}`"
            ))),
        }
    }
}

/// On-disk form: explicit templates and/or frames crossed with word lists.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateSpecFile {
    identity_terms: Vec<String>,
    #[serde(default)]
    per_term_target: PerTermTarget,
    #[serde(default)]
    templates: Vec<Template>,
    #[serde(default)]
    frames: Vec<Frame>,
    #[serde(default)]
    words: Words,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Frame {
    pattern: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Words {
    #[serde(default)]
    negative: Vec<String>,
    #[serde(default)]
    positive: Vec<String>,
}

/// A validated set of labeled templates and identity terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateSpec {
    templates: Vec<Template>,
    identity_terms: Vec<String>,
    per_term_target: PerTermTarget,
}

impl TemplateSpec {
    pub fn new(
        templates: Vec<Template>,
        identity_terms: Vec<String>,
        per_term_target: PerTermTarget,
    ) -> Result<Self> {
        for t in &templates {
            let slots = t.pattern.matches(TERM_SLOT).count();
            if slots != 1 {
                return Err(Error::InvalidTemplate {
                    pattern: t.pattern.clone(),
                    reason: format!("expected exactly one {TERM_SLOT} slot, found {slots}"),
                });
            }
        }
        let n_neg = templates
            .iter()
            .filter(|t| t.label == Label::Negative)
            .count();
        let n_pos = templates.len() - n_neg;
        if n_neg == 0 || n_pos == 0 {
            return Err(Error::InvalidTemplateSpec(
                "templates need at least one of each label".into(),
            ));
        }
        if identity_terms.is_empty() {
            return Err(Error::InvalidTemplateSpec("no identity terms".into()));
        }
        let mut seen = HashSet::new();
        for term in &identity_terms {
            crate::metrics::check_tag(term)?;
            if !seen.insert(term.as_str()) {
                return Err(Error::InvalidTemplateSpec(format!(
                    "duplicate identity term `{term}`"
                )));
            }
        }
        match per_term_target {
            PerTermTarget::AllCombinations if n_neg != n_pos => {
                return Err(Error::InvalidTemplateSpec(format!(
                    "\"all\" needs as many negative as positive templates ({n_neg} vs {n_pos})"
                )));
            }
            PerTermTarget::Count(n) if n.get() % 2 == 1 => {
                return Err(Error::InvalidTemplateSpec(format!(
                    "per_term_target {n} is odd"
                )));
            }
            _ => {}
        }
        Ok(Self {
            templates,
            identity_terms,
            per_term_target,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: TemplateSpecFile =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut templates = file.templates;
        for (label, words) in [
            (Label::Negative, &file.words.negative),
            (Label::Positive, &file.words.positive),
        ] {
            for word in words {
                for frame in &file.frames {
                    if frame.pattern.matches(WORD_SLOT).count() != 1 {
                        return Err(Error::InvalidTemplate {
                            pattern: frame.pattern.clone(),
                            reason: format!("frames need exactly one {WORD_SLOT} slot"),
                        });
                    }
                    templates.push(Template::new(
                        frame.pattern.replacen(WORD_SLOT, word, 1),
                        label,
                    ));
                }
            }
        }
        Self::new(templates, file.identity_terms, file.per_term_target)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// The shipped corpus: 50 identity terms, 1,540 examples each.
    pub fn default_corpus() -> Self {
        Self::from_toml_str(DEFAULT_CORPUS).expect("shipped corpus is valid")
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn identity_terms(&self) -> &[String] {
        &self.identity_terms
    }

    pub fn per_term_target(&self) -> PerTermTarget {
        self.per_term_target
    }

    pub fn with_identity_terms<I, S>(self, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            self.templates,
            terms.into_iter().map(Into::into).collect(),
            self.per_term_target,
        )
    }

    pub fn with_per_term_target(self, target: PerTermTarget) -> Result<Self> {
        Self::new(self.templates, self.identity_terms, target)
    }
}

/// Instantiates templates for every identity term. Each example carries
/// exactly one tag and every term is perfectly class balanced.
///
/// With a per-term count, term `t` takes templates of each label cyclically
/// starting at offset `t`, so terms do not all share the same few templates.
/// Scores are left at 0; attach them with a scorer.
pub fn generate_synthetic(spec: &TemplateSpec) -> Dataset {
    let negatives: Vec<&Template> = spec
        .templates
        .iter()
        .filter(|t| t.label == Label::Negative)
        .collect();
    let positives: Vec<&Template> = spec
        .templates
        .iter()
        .filter(|t| t.label == Label::Positive)
        .collect();

    let mut examples = Vec::new();
    for (t, term) in spec.identity_terms.iter().enumerate() {
        let chosen: Vec<&Template> = match spec.per_term_target {
            PerTermTarget::AllCombinations => spec.templates.iter().collect(),
            PerTermTarget::Count(n) => {
                let half = n.get() / 2;
                let mut both = cycle(&negatives, t, half);
                both.extend(cycle(&positives, t, half));
                both
            }
        };
        for template in chosen {
            let id = format!("syn-{:07}", examples.len());
            examples.push(
                LabeledExample::new(id, 0.0, template.label)
                    .with_subgroup(term.clone())
                    .with_text(template.instantiate(term)),
            );
        }
    }
    Dataset::from_validated(examples)
}

fn cycle<'t>(pool: &[&'t Template], start: usize, n: usize) -> Vec<&'t Template> {
    (0..n).map(|j| pool[(start + j) % pool.len()]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(terms: &[&str]) -> TemplateSpec {
        TemplateSpec::new(
            vec![
                Template::new("I am a {term} person.", Label::Negative),
                Template::new("{term} people are awful.", Label::Positive),
            ],
            terms.iter().map(|s| s.to_string()).collect(),
            PerTermTarget::AllCombinations,
        )
        .unwrap()
    }

    #[test]
    fn two_templates_three_terms() {
        let ds = generate_synthetic(&tiny(&["a", "b", "c"]));
        assert_eq!(ds.len(), 6);
        for term in ["a", "b", "c"] {
            let idx = ds.subgroup_indices(term).unwrap();
            assert_eq!(idx.len(), 2);
            let pos = idx
                .iter()
                .filter(|&&i| ds.examples()[i].label == Label::Positive)
                .count();
            assert_eq!(pos, 1);
        }
        assert_eq!(ds.examples()[0].text.as_deref(), Some("I am a a person."));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = tiny(&["x", "y"]);
        assert_eq!(generate_synthetic(&spec), generate_synthetic(&spec));
    }

    #[test]
    fn rejects_bad_slots() {
        for pattern in ["no slot here", "{term} and {term}"] {
            let err = TemplateSpec::new(
                vec![
                    Template::new(pattern, Label::Negative),
                    Template::new("{term}", Label::Positive),
                ],
                vec!["a".into()],
                PerTermTarget::AllCombinations,
            )
            .unwrap_err();
            assert!(matches!(err, Error::InvalidTemplate { .. }), "{pattern}");
        }
    }

    #[test]
    fn rejects_single_label_and_bad_terms() {
        let one_label = TemplateSpec::new(
            vec![Template::new("{term}", Label::Negative)],
            vec!["a".into()],
            PerTermTarget::AllCombinations,
        );
        assert!(matches!(one_label, Err(Error::InvalidTemplateSpec(_))));
        let spec = tiny(&["a"]);
        assert!(spec.clone().with_identity_terms(["a|b"]).is_err());
        assert!(spec.clone().with_identity_terms(["a", "a"]).is_err());
        assert!(spec
            .with_per_term_target(PerTermTarget::Count(NonZeroUsize::new(3).unwrap()))
            .is_err());
    }

    #[test]
    fn per_term_count_is_balanced() {
        let spec = TemplateSpec::default_corpus()
            .with_per_term_target(PerTermTarget::Count(NonZeroUsize::new(40).unwrap()))
            .unwrap();
        let ds = generate_synthetic(&spec);
        assert_eq!(ds.len(), 40 * 50);
        let first: Vec<_> = ds
            .subgroup_indices("gay")
            .unwrap()
            .iter()
            .map(|&i| ds.examples()[i].label)
            .collect();
        assert_eq!(first.iter().filter(|l| l.is_positive()).count(), 20);
    }

    #[test]
    fn default_corpus_shape() {
        let spec = TemplateSpec::default_corpus();
        assert_eq!(spec.identity_terms().len(), 50);
        let ds = generate_synthetic(&spec);
        assert!((70_000..=85_000).contains(&ds.len()), "{}", ds.len());
        for term in spec.identity_terms() {
            let idx = ds.subgroup_indices(term).unwrap();
            let pos = idx
                .iter()
                .filter(|&&i| ds.examples()[i].label.is_positive())
                .count();
            assert_eq!(2 * pos, idx.len(), "{term}");
        }
    }

    #[test]
    fn frames_expand_from_toml() {
        let spec = TemplateSpec::from_toml_str(
            r#"
            identity_terms = ["a", "b"]
            [[templates]]
            pattern = "plain {term}"
            label = "negative"
            [[frames]]
            pattern = "{term} is {word}"
            [words]
            negative = ["nice"]
            positive = ["awful", "gross"]
            "#,
        )
        .unwrap();
        assert_eq!(spec.templates().len(), 4);
        assert!(spec
            .templates()
            .contains(&Template::new("{term} is gross", Label::Positive)));
        assert!(TemplateSpec::from_toml_str("identity_terms = [\"a\"]\n[[frames]]\npattern = \"{term}\"\n[words]\nnegative=[\"x\"]\npositive=[\"y\"]").is_err());
    }
}
