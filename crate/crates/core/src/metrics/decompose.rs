use std::fmt;

use serde::Serialize;

use super::{mann_whitney_u, mann_whitney_u_labeled, Label, Origin, PinnedSet, UStatistic};
use crate::{Error, Result};

/// Which (negatives, positives) pair set a term covers. `Bg` is the
/// background-sample half of the pinned set and `Sub` the subgroup-sample half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairLabel {
    #[serde(rename = "bg-bg")]
    BgBg,
    #[serde(rename = "sub-sub")]
    SubSub,
    #[serde(rename = "bgNeg-subPos")]
    BgNegSubPos,
    #[serde(rename = "subNeg-bgPos")]
    SubNegBgPos,
}

impl PairLabel {
    pub const ALL: [PairLabel; 4] = [
        PairLabel::BgBg,
        PairLabel::SubSub,
        PairLabel::BgNegSubPos,
        PairLabel::SubNegBgPos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PairLabel::BgBg => "bg-bg",
            PairLabel::SubSub => "sub-sub",
            PairLabel::BgNegSubPos => "bgNeg-subPos",
            PairLabel::SubNegBgPos => "subNeg-bgPos",
        }
    }

    /// Origins of the negative and positive side.
    pub fn sides(self) -> (Origin, Origin) {
        use Origin::{BackgroundSample as B, SubgroupSample as S};
        match self {
            PairLabel::BgBg => (B, B),
            PairLabel::SubSub => (S, S),
            PairLabel::BgNegSubPos => (B, S),
            PairLabel::SubNegBgPos => (S, B),
        }
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionTerm {
    pub pair_label: PairLabel,
    pub mwu: UStatistic,
    /// `|negatives| * |positives|` for this term.
    pub pair_count: u64,
    /// `pair_count / N`.
    pub weight: f64,
    /// Absent when the term has no pairs.
    pub auc: Option<f64>,
}

/// Pinned AUC written as the pair-count weighted average of four AUCs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub subgroup: String,
    pub terms: [DecompositionTerm; 4],
    /// N, the number of (negative, positive) pairs in the whole pinned set.
    pub total_pair_count: u64,
    /// U over the whole pinned set, computed directly.
    pub union_mwu: UStatistic,
    /// `sum(weight * auc)` over the terms that have pairs.
    pub reconstructed_pinned_auc: f64,
}

impl DecompositionReport {
    pub fn term(&self, label: PairLabel) -> &DecompositionTerm {
        self.terms
            .iter()
            .find(|t| t.pair_label == label)
            .expect("every label has a term")
    }

    /// Pinned AUC taken directly from the union U.
    pub fn direct_pinned_auc(&self) -> f64 {
        self.union_mwu
            .normalized(self.total_pair_count)
            .expect("decomposition requires N > 0")
    }

    /// The four term U values add up to the union U, in exact half units.
    pub fn mwu_identity_holds(&self) -> bool {
        self.terms.iter().map(|t| t.mwu).sum::<UStatistic>() == self.union_mwu
            && self.terms.iter().map(|t| t.pair_count).sum::<u64>() == self.total_pair_count
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }
}

/// Splits the pinned set by origin and computes the four pairwise terms.
///
/// U is bilinear in the negative and positive samples, so U over the union is
/// exactly the sum of the four per-origin U values whatever the overlap
/// between the two halves.
pub fn decompose(pinned: &PinnedSet<'_>) -> Result<DecompositionReport> {
    let union_mwu = mann_whitney_u_labeled(
        pinned
            .entries()
            .iter()
            .map(|e| (e.example.score, e.example.label)),
    )?;

    let side = |origin: Origin, label: Label| -> Vec<f64> {
        pinned
            .entries()
            .iter()
            .filter(|e| e.origin == origin && e.example.label == label)
            .map(|e| e.example.score)
            .collect()
    };

    let n_neg = pinned
        .entries()
        .iter()
        .filter(|e| e.example.label == Label::Negative)
        .count() as u64;
    let n_pos = pinned.len() as u64 - n_neg;
    let total_pair_count = n_neg * n_pos;

    let mut terms = Vec::with_capacity(4);
    for pair_label in PairLabel::ALL {
        let (neg_origin, pos_origin) = pair_label.sides();
        let negatives = side(neg_origin, Label::Negative);
        let positives = side(pos_origin, Label::Positive);
        let pair_count = negatives.len() as u64 * positives.len() as u64;
        let mwu = if pair_count == 0 {
            UStatistic::ZERO
        } else {
            mann_whitney_u(&negatives, &positives)?
        };
        terms.push(DecompositionTerm {
            pair_label,
            mwu,
            pair_count,
            weight: pair_count as f64 / total_pair_count as f64,
            auc: mwu.normalized(pair_count),
        });
    }
    let terms: [DecompositionTerm; 4] = terms.try_into().expect("four pair labels");

    let reconstructed_pinned_auc = terms
        .iter()
        .filter_map(|t| t.auc.map(|a| t.weight * a))
        .sum();

    let report = DecompositionReport {
        subgroup: pinned.subgroup().to_string(),
        terms,
        total_pair_count,
        union_mwu,
        reconstructed_pinned_auc,
    };
    if !report.mwu_identity_holds() {
        return Err(Error::InvalidPinnedSet(
            "U terms do not sum to the union U".into(),
        ));
    }
    Ok(report)
}
