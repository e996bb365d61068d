//! Rank-statistics kernel: Mann-Whitney U, AUC, pinned sets, the four-term
//! decomposition of Pinned AUC, and the robust subgroup metrics.

mod dataset;
mod decompose;
mod pinned;
mod rank;
mod subgroup;

pub(crate) use dataset::{check_score, check_tag};
pub use dataset::{Dataset, Label, LabeledExample};
pub use decompose::{decompose, DecompositionReport, DecompositionTerm, PairLabel};
pub use pinned::{
    build_pinned_set, pinned_auc, Origin, PinnedEntry, PinnedSet, SamplePolicy, SampleSize,
};
pub use rank::{
    auc, auc_labeled, mann_whitney_u, mann_whitney_u_labeled, SortedScores, UStatistic,
};
pub use subgroup::{
    bias_report, bnsp_auc, bpsn_auc, subgroup_auc, AbsentReason, BiasMetrics, CellCounts, Metric,
    MetricValue, SubgroupIndex,
};
