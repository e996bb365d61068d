use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{
    build_pinned_set, mann_whitney_u, pinned_auc, Dataset, Label, SamplePolicy, SortedScores,
    UStatistic,
};
use crate::{seed, Error, Result};

/// Why a metric has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsentReason {
    EmptyNegativeSide,
    EmptyPositiveSide,
    EmptyBothSides,
    UnknownSubgroup,
    UnsatisfiablePolicy,
}

impl AbsentReason {
    pub fn code(self) -> &'static str {
        match self {
            AbsentReason::EmptyNegativeSide => "empty-negative-side",
            AbsentReason::EmptyPositiveSide => "empty-positive-side",
            AbsentReason::EmptyBothSides => "empty-both-sides",
            AbsentReason::UnknownSubgroup => "unknown-subgroup",
            AbsentReason::UnsatisfiablePolicy => "unsatisfiable-policy",
        }
    }

    fn for_sides(n_neg: usize, n_pos: usize) -> Option<Self> {
        match (n_neg, n_pos) {
            (0, 0) => Some(AbsentReason::EmptyBothSides),
            (0, _) => Some(AbsentReason::EmptyNegativeSide),
            (_, 0) => Some(AbsentReason::EmptyPositiveSide),
            _ => None,
        }
    }
}

impl fmt::Display for AbsentReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A metric value, or an explicit absence with its reason. Degenerate pair
/// sets never silently become 0 or 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Value(f64),
    Absent(AbsentReason),
}

impl MetricValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MetricValue::Value(v) => Some(v),
            MetricValue::Absent(_) => None,
        }
    }

    pub fn reason(self) -> Option<AbsentReason> {
        match self {
            MetricValue::Value(_) => None,
            MetricValue::Absent(r) => Some(r),
        }
    }

    fn from_u(u: UStatistic, n_neg: usize, n_pos: usize) -> Self {
        match AbsentReason::for_sides(n_neg, n_pos) {
            Some(reason) => MetricValue::Absent(reason),
            None => MetricValue::Value(u.normalized((n_neg * n_pos) as u64).expect("pairs > 0")),
        }
    }

    pub(crate) fn from_result(r: Result<f64>) -> Result<Self> {
        match r {
            Ok(v) => Ok(MetricValue::Value(v)),
            Err(Error::EmptySide { side: "negative" }) => {
                Ok(MetricValue::Absent(AbsentReason::EmptyNegativeSide))
            }
            Err(Error::EmptySide { .. }) => {
                Ok(MetricValue::Absent(AbsentReason::EmptyPositiveSide))
            }
            Err(Error::UnsatisfiablePolicy { .. }) => {
                Ok(MetricValue::Absent(AbsentReason::UnsatisfiablePolicy))
            }
            Err(Error::UnknownSubgroup(_)) => {
                Ok(MetricValue::Absent(AbsentReason::UnknownSubgroup))
            }
            Err(e) => Err(e),
        }
    }
}

impl Serialize for MetricValue {
    /// `{"value": 0.93}` or `{"value": null, "reason": "empty-negative-side"}`.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MetricValue::Value(v) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("value", v)?;
                m.end()
            }
            MetricValue::Absent(r) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("value", &Option::<f64>::None)?;
                m.serialize_entry("reason", r.code())?;
                m.end()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SubgroupAuc,
    BpsnAuc,
    BnspAuc,
    PinnedAuc,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::SubgroupAuc,
        Metric::BpsnAuc,
        Metric::BnspAuc,
        Metric::PinnedAuc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::SubgroupAuc => "subgroup_auc",
            Metric::BpsnAuc => "bpsn_auc",
            Metric::BnspAuc => "bnsp_auc",
            Metric::PinnedAuc => "pinned_auc",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Example counts per (membership, class) cell. The background here is every
/// example without the subgroup tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CellCounts {
    pub subgroup_negative: usize,
    pub subgroup_positive: usize,
    pub background_negative: usize,
    pub background_positive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasMetrics {
    pub subgroup: String,
    pub subgroup_auc: MetricValue,
    pub bpsn_auc: MetricValue,
    pub bnsp_auc: MetricValue,
    pub pinned_auc: MetricValue,
    pub counts: CellCounts,
}

impl BiasMetrics {
    pub fn get(&self, metric: Metric) -> MetricValue {
        match metric {
            Metric::SubgroupAuc => self.subgroup_auc,
            Metric::BpsnAuc => self.bpsn_auc,
            Metric::BnspAuc => self.bnsp_auc,
            Metric::PinnedAuc => self.pinned_auc,
        }
    }

    fn unknown(subgroup: &str) -> Self {
        let absent = MetricValue::Absent(AbsentReason::UnknownSubgroup);
        Self {
            subgroup: subgroup.to_string(),
            subgroup_auc: absent,
            bpsn_auc: absent,
            bnsp_auc: absent,
            pinned_auc: absent,
            counts: CellCounts::default(),
        }
    }
}

struct Split {
    sub_neg: Vec<f64>,
    sub_pos: Vec<f64>,
    bg_neg: Vec<f64>,
    bg_pos: Vec<f64>,
}

fn split(dataset: &Dataset, subgroup: &str) -> Result<Split> {
    if !dataset.contains_subgroup(subgroup) {
        return Err(Error::UnknownSubgroup(subgroup.to_string()));
    }
    let mut s = Split {
        sub_neg: Vec::new(),
        sub_pos: Vec::new(),
        bg_neg: Vec::new(),
        bg_pos: Vec::new(),
    };
    for ex in dataset.examples() {
        let bucket = match (ex.has_subgroup(subgroup), ex.label) {
            (true, Label::Negative) => &mut s.sub_neg,
            (true, Label::Positive) => &mut s.sub_pos,
            (false, Label::Negative) => &mut s.bg_neg,
            (false, Label::Positive) => &mut s.bg_pos,
        };
        bucket.push(ex.score);
    }
    Ok(s)
}

fn metric(negatives: &[f64], positives: &[f64]) -> Result<MetricValue> {
    match AbsentReason::for_sides(negatives.len(), positives.len()) {
        Some(reason) => Ok(MetricValue::Absent(reason)),
        None => Ok(MetricValue::Value(crate::metrics::auc(
            negatives, positives,
        )?)),
    }
}

/// AUC restricted to the subgroup's own examples.
pub fn subgroup_auc(dataset: &Dataset, subgroup: &str) -> Result<MetricValue> {
    let s = split(dataset, subgroup)?;
    metric(&s.sub_neg, &s.sub_pos)
}

/// Background Positive, Subgroup Negative AUC: subgroup negatives against the
/// positives outside the subgroup. Low values mean the subgroup's negatives
/// score like positives.
pub fn bpsn_auc(dataset: &Dataset, subgroup: &str) -> Result<MetricValue> {
    let s = split(dataset, subgroup)?;
    metric(&s.sub_neg, &s.bg_pos)
}

/// Background Negative, Subgroup Positive AUC: negatives outside the subgroup
/// against subgroup positives.
pub fn bnsp_auc(dataset: &Dataset, subgroup: &str) -> Result<MetricValue> {
    let s = split(dataset, subgroup)?;
    metric(&s.bg_neg, &s.sub_pos)
}

/// Class-sorted scores of a whole dataset, for computing the subgroup metrics
/// of many tags without re-sorting the background each time.
///
/// The background side of BPSN/BNSP is obtained as "everything minus the
/// subgroup": `U(sub_neg, bg_pos) = U(sub_neg, all_pos) - U(sub_neg, sub_pos)`.
pub struct SubgroupIndex<'a> {
    dataset: &'a Dataset,
    negatives: SortedScores,
    positives: SortedScores,
}

impl<'a> SubgroupIndex<'a> {
    pub fn new(dataset: &'a Dataset) -> Self {
        let (mut neg, mut pos) = (Vec::new(), Vec::new());
        for ex in dataset.examples() {
            match ex.label {
                Label::Negative => neg.push(ex.score),
                Label::Positive => pos.push(ex.score),
            }
        }
        // Dataset scores are validated, so neither can be NaN.
        Self {
            dataset,
            negatives: SortedScores::new(neg).expect("validated scores"),
            positives: SortedScores::new(pos).expect("validated scores"),
        }
    }

    /// Subgroup, BPSN and BNSP AUC plus cell counts; `pinned_auc` is left
    /// absent for the caller to fill in.
    pub fn robust_metrics(&self, subgroup: &str) -> Result<BiasMetrics> {
        let members = self
            .dataset
            .subgroup_indices(subgroup)
            .ok_or_else(|| Error::UnknownSubgroup(subgroup.to_string()))?;
        let (mut sub_neg, mut sub_pos) = (Vec::new(), Vec::new());
        for &i in members {
            let ex = &self.dataset.examples()[i];
            match ex.label {
                Label::Negative => sub_neg.push(ex.score),
                Label::Positive => sub_pos.push(ex.score),
            }
        }
        let within = if sub_neg.is_empty() || sub_pos.is_empty() {
            UStatistic::ZERO
        } else {
            mann_whitney_u(&sub_neg, &sub_pos)?
        };
        let bg_neg = self.negatives.len() - sub_neg.len();
        let bg_pos = self.positives.len() - sub_pos.len();
        let bpsn_u = self.positives.u_as_positives(&sub_neg) - within;
        let bnsp_u = self.negatives.u_as_negatives(&sub_pos) - within;

        Ok(BiasMetrics {
            subgroup: subgroup.to_string(),
            subgroup_auc: MetricValue::from_u(within, sub_neg.len(), sub_pos.len()),
            bpsn_auc: MetricValue::from_u(bpsn_u, sub_neg.len(), bg_pos),
            bnsp_auc: MetricValue::from_u(bnsp_u, bg_neg, sub_pos.len()),
            pinned_auc: MetricValue::Absent(AbsentReason::EmptyBothSides),
            counts: CellCounts {
                subgroup_negative: sub_neg.len(),
                subgroup_positive: sub_pos.len(),
                background_negative: bg_neg,
                background_positive: bg_pos,
            },
        })
    }
}

/// All four metrics for each tag. Unknown tags yield a row of
/// `unknown-subgroup` absences instead of failing the whole report.
///
/// Each tag's pinned set is drawn with seed `derive_str(policy.seed, tag)`.
pub fn bias_report<S: AsRef<str>>(
    dataset: &Dataset,
    subgroups: &[S],
    policy: &SamplePolicy,
) -> Result<Vec<BiasMetrics>> {
    let index = SubgroupIndex::new(dataset);
    let mut rows = Vec::with_capacity(subgroups.len());
    for tag in subgroups {
        let tag = tag.as_ref();
        let mut row = match index.robust_metrics(tag) {
            Ok(row) => row,
            Err(Error::UnknownSubgroup(_)) => {
                rows.push(BiasMetrics::unknown(tag));
                continue;
            }
            Err(e) => return Err(e),
        };
        let tag_policy = policy.with_seed(seed::derive_str(policy.seed, tag));
        row.pinned_auc = MetricValue::from_result(
            build_pinned_set(dataset, tag, &tag_policy).and_then(|pinned| pinned_auc(&pinned)),
        )?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::metrics::LabeledExample;

    fn ex(id: usize, score: f64, label: Label, tag: Option<&str>) -> LabeledExample {
        let e = LabeledExample::new(format!("e{id}"), score, label);
        match tag {
            Some(t) => e.with_subgroup(t),
            None => e,
        }
    }

    /// Subgroup {(0.2,-),(0.4,-),(0.3,+),(0.6,+)}, background negatives
    /// {0.2, 0.4} and positives {0.3, 0.6}.
    fn mixed() -> Dataset {
        use Label::*;
        Dataset::new(vec![
            ex(0, 0.2, Negative, Some("g")),
            ex(1, 0.4, Negative, Some("g")),
            ex(2, 0.3, Positive, Some("g")),
            ex(3, 0.6, Positive, Some("g")),
            ex(4, 0.2, Negative, None),
            ex(5, 0.4, Negative, None),
            ex(6, 0.3, Positive, None),
            ex(7, 0.6, Positive, None),
        ])
        .unwrap()
    }

    #[test]
    fn mixed_two_by_two_cases() {
        let ds = mixed();
        assert_eq!(subgroup_auc(&ds, "g").unwrap(), MetricValue::Value(0.75));
        assert_eq!(bpsn_auc(&ds, "g").unwrap(), MetricValue::Value(0.75));
        assert_eq!(bnsp_auc(&ds, "g").unwrap(), MetricValue::Value(0.75));
    }

    #[test]
    fn separated_and_inverted() {
        use Label::*;
        let ds = Dataset::new(vec![
            ex(0, 0.1, Negative, Some("g")),
            ex(1, 0.9, Positive, Some("g")),
            ex(2, 0.5, Positive, None),
            ex(3, 0.05, Negative, None),
        ])
        .unwrap();
        assert_eq!(subgroup_auc(&ds, "g").unwrap(), MetricValue::Value(1.0));
        assert_eq!(bpsn_auc(&ds, "g").unwrap(), MetricValue::Value(1.0));
        assert_eq!(bnsp_auc(&ds, "g").unwrap(), MetricValue::Value(1.0));

        // Subgroup negatives above every background positive.
        let inverted = ds.with_scores(&[0.8, 0.9, 0.5, 0.05]).unwrap();
        assert_eq!(bpsn_auc(&inverted, "g").unwrap(), MetricValue::Value(0.0));

        let flat = ds.with_scores(&[0.5; 4]).unwrap();
        assert_eq!(bnsp_auc(&flat, "g").unwrap(), MetricValue::Value(0.5));
    }

    #[test]
    fn positives_only_subgroup_is_absent() {
        use Label::*;
        let ds = Dataset::new(vec![
            ex(0, 0.7, Positive, Some("g")),
            ex(1, 0.1, Negative, None),
        ])
        .unwrap();
        assert_eq!(
            subgroup_auc(&ds, "g").unwrap(),
            MetricValue::Absent(AbsentReason::EmptyNegativeSide)
        );
        assert_eq!(
            bpsn_auc(&ds, "g").unwrap(),
            MetricValue::Absent(AbsentReason::EmptyBothSides)
        );
        assert_eq!(bnsp_auc(&ds, "g").unwrap(), MetricValue::Value(1.0));
    }

    #[test]
    fn unknown_subgroup_is_an_error() {
        assert!(matches!(
            subgroup_auc(&mixed(), "x"),
            Err(Error::UnknownSubgroup(_))
        ));
        assert!(matches!(
            bpsn_auc(&mixed(), "x"),
            Err(Error::UnknownSubgroup(_))
        ));
        assert!(matches!(
            bnsp_auc(&mixed(), "x"),
            Err(Error::UnknownSubgroup(_))
        ));
    }

    #[test]
    fn report_composes_single_operations() {
        let ds = mixed();
        let policy = SamplePolicy::default().with_seed(9);
        let report = bias_report(&ds, &["g"], &policy).unwrap();
        assert_eq!(report.len(), 1);
        let row = &report[0];
        assert_eq!(row.subgroup_auc, subgroup_auc(&ds, "g").unwrap());
        assert_eq!(row.bpsn_auc, bpsn_auc(&ds, "g").unwrap());
        assert_eq!(row.bnsp_auc, bnsp_auc(&ds, "g").unwrap());
        let pinned =
            build_pinned_set(&ds, "g", &policy.with_seed(seed::derive_str(9, "g"))).unwrap();
        assert_eq!(
            row.pinned_auc,
            MetricValue::Value(pinned_auc(&pinned).unwrap())
        );
        assert_eq!(
            row.counts,
            CellCounts {
                subgroup_negative: 2,
                subgroup_positive: 2,
                background_negative: 2,
                background_positive: 2
            }
        );
    }

    #[test]
    fn report_handles_empty_and_unknown() {
        let ds = mixed();
        let none: [&str; 0] = [];
        assert!(bias_report(&ds, &none, &SamplePolicy::default())
            .unwrap()
            .is_empty());
        let rows = bias_report(&ds, &["x", "g"], &SamplePolicy::default()).unwrap();
        assert_eq!(
            rows[0].pinned_auc,
            MetricValue::Absent(AbsentReason::UnknownSubgroup)
        );
        assert_eq!(rows[1].subgroup_auc, MetricValue::Value(0.75));
    }

    #[test]
    fn absent_value_serializes_with_reason() {
        let json =
            serde_json::to_string(&MetricValue::Absent(AbsentReason::EmptyNegativeSide)).unwrap();
        assert_eq!(json, r#"{"value":null,"reason":"empty-negative-side"}"#);
        assert_eq!(
            serde_json::to_string(&MetricValue::Value(0.5)).unwrap(),
            r#"{"value":0.5}"#
        );
    }

    fn random_dataset() -> impl Strategy<Value = Dataset> {
        prop::collection::vec((0u32..=10, any::<bool>(), 0u8..3), 1..80).prop_map(|rows| {
            let examples = rows
                .into_iter()
                .enumerate()
                .map(|(i, (s, pos, tag))| {
                    let label = if pos {
                        Label::Positive
                    } else {
                        Label::Negative
                    };
                    let e = LabeledExample::new(format!("e{i}"), f64::from(s) / 10.0, label)
                        .with_subgroup("all");
                    match tag {
                        0 => e.with_subgroup("g"),
                        1 => e.with_subgroups(["g", "h"]),
                        _ => e,
                    }
                })
                .collect();
            Dataset::new(examples).unwrap()
        })
    }

    proptest! {
        #[test]
        fn index_route_matches_direct(ds in random_dataset()) {
            let index = SubgroupIndex::new(&ds);
            for tag in ["g", "h"] {
                if !ds.contains_subgroup(tag) {
                    continue;
                }
                let row = index.robust_metrics(tag).unwrap();
                prop_assert_eq!(row.subgroup_auc, subgroup_auc(&ds, tag).unwrap());
                prop_assert_eq!(row.bpsn_auc, bpsn_auc(&ds, tag).unwrap());
                prop_assert_eq!(row.bnsp_auc, bnsp_auc(&ds, tag).unwrap());
            }
        }
    }
}
